from clslvr import *
import numpy as np
import math
import time

# continued fractions of random quadratic surds (p + s sqrt(d))/q in (0,1) :
n_surds = 1000
depth   = 30
rng     = np.random.default_rng(0)

out_dir = './results/'

start = time.time()
rows  = []
while len(rows) < n_surds:
	d = int(rng.integers(2, 500))
	if math.isqrt(d)**2 == d:
		continue
	q = int(rng.integers(2, 60))
	r = math.sqrt(d)
	p = int(rng.integers(math.ceil(-r), math.floor(q - r) + 1))
	try:
		alpha = IrrationalSpec.surd(1, p, d, q)
	except InvalidParameter:
		continue
	cf     = cf_expand(alpha, depth)
	report = cf.validate()
	rows.append(dict(report, alpha=alpha.to_string()))

runtime = time.time() - start
failed  = [r for r in rows if not all(v for k, v in r.items() if k != 'alpha')]
print_text("::: %i surds to depth %i in %.2f s, %i failures :::"
           % (len(rows), depth, runtime, len(failed)), '111')
write_csv(rows, ['alpha', 'recurrence', 'determinant', 'increasing',
                 'alternating', 'best_approximation'], out_dir + 'surds.csv')

# the golden mean and a Liouville truncation :
golden = cf_expand('surd:1,-1,5,2', 60)
c      = classify(golden)
tail   = brjuno_tail(golden, 30)
print_text("::: golden mean : %s, tail beyond N = 30 : %.3e :::"
           % (c.label, tail), '111')

liou = cf_expand('liouville:3', 3)
print_text("::: liouville:3 : %s :::" % classify(liou).label, '111')
write_json({'golden' : c.to_dict(), 'golden_tail' : tail,
            'liouville' : classify(liou).to_dict(),
            'surds' : len(rows), 'failures' : len(failed)},
           out_dir + 'classification.json')
