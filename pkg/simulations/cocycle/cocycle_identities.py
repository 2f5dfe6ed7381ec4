from clslvr import *
import numpy as np
import math

# trace identities on random standard-map orbits :
n_runs = 100
rng    = np.random.default_rng(2)
f      = StandardMap(6.0)

rows = []
for k in range(n_runs):
	x     = f.domain.halton(k + 1)[-1]
	q     = int(rng.integers(10, 501))
	orbit = iterate(f, x, q)
	tri   = most_contracting(f, x, q, orbit=orbit)
	tr    = trace(f, tri, q, orbit=orbit)

	# sum lambda_s = -log ||Dg^q|| along the most contracted direction :
	gr    = derivative_growth(f, [q], [x]).log_norms[0]
	rel   = abs(float(np.sum(tr.lambda_s)) + gr) / max(gr, 1.0)
	P, ls, ld = accumulate_product(orbit.jacobians[:q])
	s_max, s_min = singular_values2(P)
	# log of the singular-value product of Dg^q, zero up to rounding :
	log_sv = math.log(s_max) + math.log(s_min) + 2*ls
	try:
		cot_recursion_bound(tr, f.d1_bound)
		cot_ok = True
	except BoundViolated:
		cot_ok = False
	rows.append({'run' : k, 'q' : q, 'stable_sum_rel' : rel,
	             'log_svd_product' : log_sv, 'cot_ok' : cot_ok})

print_min_max([r['stable_sum_rel'] for r in rows], '::: |sum lambda_s + log||Dg^q|||')
print_min_max([r['log_svd_product'] for r in rows],
              '::: log singular-value product')

# the linear good-index scan against the quadratic reference :
agree = 0
for k in range(20):
	res   = good_in_orbit(f, f.domain.halton(40 + k)[-1], 2000, 1.0)
	fast  = (res.forward, res.backward)
	brute = good_index_bruteforce(res.trace.lambda_bar_e,
	                              (1 - res.slack)*res.a)
	agree += int(fast == brute)
print_text("::: good_in_orbit agrees with the reference on %i of 20 orbits :::"
           % agree, '180')
write_csv(rows, ['run', 'q', 'stable_sum_rel', 'log_svd_product', 'cot_ok'],
          './results/cocycle_identities.csv')
