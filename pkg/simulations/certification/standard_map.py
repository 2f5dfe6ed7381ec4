from clslvr import *
import numpy as np
import time

# the standard map at k = 6, good point at q = 10^5 :
k       = 6.0
q       = 10**5
seeds   = 32
M       = 1000
out_dir = './results/standard_map/'

f     = StandardMap(k)
a     = 0.9 * np.log(f.d1_bound)
start = time.time()

gp = goodpoint_search(f, q, a, {'seeds'        : seeds,
                                'refine'       : True,
                                'min_return'   : 'auto',
                                'match_radius' : CERTIFY_MATCH_RADIUS})
t_search = time.time() - start
if isinstance(gp, NotFound):
	print_text(">>> no good point : %s <<<" % gp.reason, 'red', 1)
	raise SystemExit(2)

print_text("::: good point after %.1f s, return time %i :::"
           % (t_search, gp.trace.length), cls=gp)
print_text("::: independent re-verification : %s :::"
           % verify_goodpoint(gp), cls=gp)
write_json(gp, out_dir + 'goodpoint.json')

# with the desk schedule and with the fixed M = 1000 of the log-domain
# identities :
for m in ('auto', M):
	try:
		cert = certify(f, gp, {'M' : m})
	except StageError as e:
		print_text(str(e), 'red', 1)
		continue
	s  = cert.schedule
	z  = np.asarray(cert.fixed_point)
	y  = z
	for i in range(cert.period):
		y = np.asarray(f.step(*y))
	print_text("::: M = %i : regime %s, residual %.3e, re-iterated %.3e, "
	           "eigenvalue product %.12f :::"
	           % (s.M, cert.regime, cert.residual,
	              f.domain.distance(y, z), cert.spectrum.product()),
	           cls=cert)
	print_min_max(s.margins['identities'], '::: schedule identities',
	              cls=s)
	write_json(cert, out_dir + 'certificate_M_%s.json' % m)
