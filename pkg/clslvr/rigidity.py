"""
Rigidity of pseudo-rotations, measured.

Rotation numbers from the lifted angular displacement, the displacement and
free-disc bounds for pseudo-rotations, first-return statistics, the Hoelder
and non-Brjuno rigidity tables along convergent denominators, and the
growth-gap scan which hands a map with fast derivative growth over to the
good-point search and the certifier.

Statements that only hold for pseudo-rotations are asserted only when the
rotation numbers of 16 seeds agree to ``1e-3``; otherwise the numbers are
reported as information.
"""
from clslvr.helper      import ClslvrError, DomainEscape, InvalidParameter, \
                               InfeasibleIterationCount, StageError, \
                               parallel_map, merge_params, chunks
from clslvr.inputoutput import print_text, print_min_max, print_params
from clslvr.maps        import ComposedMap, derivative_growth
from clslvr.arithmetic  import cf_expand, superliouville_profile, \
                               nonbrjuno_subsequence
from clslvr.certifier   import search_and_certify
from shapely.geometry   import Polygon
from scipy.spatial.distance import pdist
import numpy                as np
import math


def default_rigidity_params():
	"""
	Monte-Carlo and sampling parameters of the rigidity operations.
	"""
	return {'gate_seeds'      : 16,
	        'gate_iterations' : 1000,
	        'gate_spread'     : 1e-3,
	        'chunk'           : 4096,
	        'grid'            : 24,
	        'ball_samples'    : 64,
	        'disc_samples'    : 64,
	        'bisections'      : 30,
	        'confirm'         : 16,
	        'slack'           : 0.05,
	        'max_iterations'  : 10**6}


class RigidityReport(object):
	"""
	Result of a rigidity operation : table rows for CSV and a summary for
	JSON, both carrying the seed and the pseudo-rotation gate.
	"""
	def __init__(self, operation, rows, summary, gate=None, seed=None):
		self.operation = operation
		self._rows     = rows
		self._summary  = summary
		self.gate      = gate
		self.seed      = seed

	def color(self):
		"""
		return the default color for this class.
		"""
		return '213'

	def __getitem__(self, key):
		return self._summary[key]

	def rows(self):
		"""
		:rtype: list of dict
		"""
		return [dict(r, seed=self.seed) for r in self._rows]

	def summary(self):
		"""
		:rtype: dict
		"""
		d = {'operation' : self.operation, 'seed' : self.seed,
		     'gate' : self.gate}
		d.update(self._summary)
		return d


#===============================================================================
# rotation numbers :

class RotationEstimate(object):
	"""
	Birkhoff average of the lifted angular displacement, one value per seed.
	``value`` is the seed mean reduced to ``[0, 1)`` and ``spread`` the
	range of the per-seed averages.
	"""
	def __init__(self, per_seed, iterations, lift_sums):
		self.per_seed   = per_seed
		self.iterations = iterations
		self.lift_sums  = lift_sums
		self.spread     = float(max(per_seed) - min(per_seed))
		self.value      = math.fsum(per_seed) / len(per_seed) % 1.0

	def color(self):
		"""
		return the default color for this class.
		"""
		return '213'

	def rows(self):
		return [{'seed_index' : i, 'value' : v, 'lift_sum' : s,
		         'iterations' : self.iterations}
		        for i, (v, s) in enumerate(zip(self.per_seed, self.lift_sums))]

	def summary(self):
		return {'value' : self.value, 'spread' : self.spread,
		        'iterations' : self.iterations, 'seeds' : len(self.per_seed)}


def rotation_number(map, seeds, n):
	"""
	Rotation number of ``map`` from ``n`` iterations of every seed.

	:param map: a map with an angular coordinate
	:param seeds: starting points, away from the origin for disk maps
	:param n: number of iterations
	:raises DomainEscape: if an orbit leaves the domain
	:rtype: :class:`~rigidity.RotationEstimate`
	"""
	if not map.has_turns():
		raise InvalidParameter("map '%s' has no angular coordinate" % map.label)
	n     = int(n)
	if n < 1:
		raise InvalidParameter("iteration count must be positive, not %i" % n)
	y     = np.atleast_2d(np.asarray(seeds, dtype=float))
	if map.domain.kind == 'disk' and np.any(np.linalg.norm(y, axis=-1) < 1e-12):
		raise InvalidParameter("rotation seeds must avoid the origin")
	T     = np.empty((n, len(y)))
	for i in range(n):
		T[i] = map.turns(y)
		y    = map.eval(y)
		out  = ~map.domain.contains(y)
		if np.any(out):
			raise DomainEscape(i + 1, y[int(np.argmax(out))])
	sums  = [math.fsum(T[:,s]) for s in range(T.shape[1])]
	est   = RotationEstimate([s / n for s in sums], n, sums)
	print_text("::: rotation number %.12f over %i seeds, spread %.3e :::"
	           % (est.value, len(sums), est.spread), cls=est)
	return est


def pseudo_rotation_gate(map, params=None):
	"""
	Decide whether assertions that need a pseudo-rotation apply : the
	rotation numbers of ``gate_seeds`` Halton seeds must agree to within
	``gate_spread``.

	:rtype: dict
	"""
	params = merge_params(default_rigidity_params(), params,
	                      'rigidity parameters')
	gate   = {'seeds'      : int(params['gate_seeds']),
	          'iterations' : int(params['gate_iterations']),
	          'threshold'  : params['gate_spread']}
	if not map.has_turns():
		gate.update(passed=False, reason='no angular coordinate')
		return gate
	seeds = map.domain.halton(gate['seeds'], 0.9)
	try:
		est = rotation_number(map, seeds, gate['iterations'])
	except DomainEscape as e:
		gate.update(passed=False, reason=str(e))
		return gate
	gate.update(passed=bool(est.spread < params['gate_spread']),
	            value=est.value, spread=est.spread)
	return gate


#===============================================================================
# displacement bound :

def _ball(center, radius, k):
	# k boundary points, a ring at half radius and the center :
	t   = 2*np.pi*np.arange(k) / k
	c   = np.stack([np.cos(t), np.sin(t)], axis=-1)
	off = np.concatenate([c*radius, 0.5*c[::2]*radius, np.zeros((1,2))])
	return np.asarray(center, dtype=float)[...,None,:] + off


def ball_diameters(map, X, radius, k=64):
	"""
	Sampled diameters of ``map(B(x, radius) & domain)`` for every ``x`` in
	``X``.

	:rtype: :class:`~numpy.ndarray`
	"""
	P    = _ball(X, radius, k)
	ok   = map.domain.contains(P)
	img  = map.eval(np.where(ok[...,None], P, np.asarray(X)[:,None,:]))
	diam = np.empty(len(X))
	for i in range(len(X)):
		pts     = img[i][ok[i]]
		diam[i] = np.max(pdist(pts)) if len(pts) > 1 else 0.0
	return diam


def displacement_bound(map, eps, grid=None, ball_samples=64, gate=None):
	"""
	Compare ``||f - Id||_0`` with ``eps^1/2 + max_x diam f(B(x, eps^1/2))``.
	The left side is the sup over the grid, the ball images are sampled on
	their boundary, a ring and the center.  The comparison is asserted only
	when the pseudo-rotation gate passes; otherwise a violation is reported
	without being an error.

	:param map: the map
	:param eps: its rotation number, in ``(0, 1/4)``
	:param grid: grid resolution or explicit points
	:raises DomainEscape: if a grid point leaves the domain
	:rtype: :class:`~rigidity.RigidityReport`
	"""
	eps = float(eps)
	if not 0 < eps < 0.25:
		raise InvalidParameter("eps must lie in (0, 1/4), not %g" % eps)
	X   = map.domain.grid(24 if grid is None else int(grid)) \
	      if grid is None or np.isscalar(grid) else np.asarray(grid, dtype=float)
	Y   = map.eval(X)
	out = ~map.domain.contains(Y)
	if np.any(out):
		raise DomainEscape(1, Y[int(np.argmax(out))])
	disp = map.domain.distance(Y, X)
	lhs  = float(np.max(disp))
	s    = math.sqrt(eps)
	diam = ball_diameters(map, X, s, int(ball_samples))
	rhs  = s + float(np.max(diam))
	if gate is None:
		gate = pseudo_rotation_gate(map)
	rows = [{'x' : x[0], 'y' : x[1], 'displacement' : d, 'diameter' : b}
	        for x, d, b in zip(X, disp, diam)]
	summ = {'eps' : eps, 'lhs' : lhs, 'rhs' : rhs, 'margin' : rhs - lhs,
	        'holds' : lhs <= rhs, 'asserted' : bool(gate['passed']),
	        'grid_points' : len(X), 'ball_samples' : int(ball_samples)}
	rep  = RigidityReport('displacement', rows, summ, gate)
	if summ['asserted'] and not summ['holds']:
		print_text(">>> displacement bound violated : %.6e > %.6e <<<"
		           % (lhs, rhs), cls=rep)
	else:
		print_text("::: ||f - Id|| = %.6e, bound %.6e :::" % (lhs, rhs),
		           cls=rep)
	return rep


#===============================================================================
# free discs :

def _free_radii(map, centers, smax, k, bisections):
	# largest free radius per center by bisection; a disc is free when the
	# sampled image of its boundary stays at distance > s (1 + 1/k) from the
	# center, which for an area-preserving map excludes f(D) & D
	lo  = np.zeros(len(centers))
	hi  = np.array(smax, dtype=float)
	t   = 2*np.pi*np.arange(k) / k
	u   = np.stack([np.cos(t), np.sin(t)], axis=-1)

	def free(s):
		P   = centers[:,None,:] + s[:,None,None]*u[None,:,:]
		d   = map.domain.distance(map.eval(P), centers[:,None,:])
		return np.min(d, axis=1) > s*(1 + 1.0/k)

	ok  = free(hi)
	lo[ok] = hi[ok]
	for i in range(int(bisections)):
		mid    = 0.5*(lo + hi)
		ok     = free(mid)
		lo     = np.where(ok, mid, lo)
		hi     = np.where(ok, hi, mid)
	return lo


def _confirm(map, center, radius, k):
	t    = 2*np.pi*np.arange(k) / k
	ring = np.asarray(center)[None,:] + radius*np.stack([np.cos(t), np.sin(t)],
	                                                    axis=-1)
	disc = Polygon(ring)
	img  = Polygon(map.eval(ring))
	return img.is_valid and not img.intersects(disc)


def first_return(map, center, radius, horizon, k=64):
	"""
	Smallest ``n <= horizon`` at which the sampled image of the disc
	boundary meets the disc, ``None`` if there is none.
	"""
	t   = 2*np.pi*np.arange(k) / k
	P   = np.asarray(center)[None,:] + radius*np.stack([np.cos(t), np.sin(t)],
	                                                   axis=-1)
	for n in range(1, int(horizon) + 1):
		P = map.eval(P)
		if np.min(map.domain.distance(P, np.asarray(center)[None,:])) <= radius:
			return n
	return None


def free_disc_search(map, eps, trials, horizon, rng_seed, params=None,
                     gate=None, threads=None):
	"""
	Monte-Carlo search of the largest free disc ``D``, ``f(D) & D = 0``.

	Centers are drawn uniformly in the domain, in chunks of ``chunk`` trials
	with the streams ``default_rng([rng_seed, chunk index])``; the largest
	free radius about every center is found by bisection, and the best discs
	are confirmed with polygon intersection.  Areas are normalized by the
	domain area.  When the gate passes, the normalized area is asserted to be
	at most ``eps (1 + slack)``.  ``horizon`` bounds the first-return time
	reported for the best disc.

	:rtype: :class:`~rigidity.RigidityReport`
	"""
	params = merge_params(default_rigidity_params(), params,
	                      'rigidity parameters')
	trials, horizon = int(trials), int(horizon)
	if trials < 1 or horizon < 1:
		raise InvalidParameter("trials and horizon must be positive")
	domain = map.domain
	k      = int(params['disc_samples'])

	def chunk(c):
		i, start, stop = c
		rng   = np.random.default_rng([int(rng_seed), i])
		C     = domain._unit_square(rng.random((stop - start, 2)))
		smax  = _max_radius(domain, C)
		r     = _free_radii(map, C, smax, k, params['bisections'])
		order = np.argsort(-r, kind='stable')[:int(params['confirm'])]
		return [(float(r[j]), start + int(j), C[j]) for j in order]

	parts = chunks(trials, int(params['chunk']))
	best  = sorted([b for part in parallel_map(chunk, parts, threads)
	                for b in part], key=lambda b : (-b[0], b[1]))
	found = None
	for r, index, c in best:
		if r <= 0:
			break
		if _confirm(map, c, r, k):
			found = (r, index, c)
			break

	if gate is None:
		gate = pseudo_rotation_gate(map, params)
	area = 0.0 if found is None else math.pi*found[0]**2 / domain.area()
	summ = {'eps' : eps, 'trials' : trials, 'horizon' : horizon,
	        'radius' : 0.0 if found is None else found[0],
	        'center' : None if found is None else found[2],
	        'trial' : None if found is None else found[1],
	        'area' : area,
	        'bound' : None if eps is None else eps*(1 + params['slack']),
	        'asserted' : bool(gate['passed']) and eps is not None,
	        'first_return' : None if found is None else
	                         first_return(map, found[2], found[0], horizon, k),
	        'disc_samples' : k}
	summ['holds'] = eps is None or area <= summ['bound']
	rows = [{'trial' : i, 'radius' : r, 'x' : c[0], 'y' : c[1]}
	        for r, i, c in best]
	rep  = RigidityReport('free-disc', rows, summ, gate, rng_seed)
	print_text("::: largest free disc : radius %.6e, normalized area %.6e :::"
	           % (summ['radius'], area), cls=rep)
	return rep


def _max_radius(domain, C):
	# radius of the largest disc about C inside the domain :
	if domain.kind == 'disk':
		return domain.radius - np.linalg.norm(C, axis=-1)
	if domain.kind == 'annulus':
		h = np.full(len(C), np.pi) if domain.periodic else \
		    np.minimum(C[:,1] - domain.inner, domain.outer - C[:,1])
		return np.minimum(h, domain.validity_radius)
	x0, x1, y0, y1 = domain.box
	return np.min(np.stack([C[:,0] - x0, x1 - C[:,0], C[:,1] - y0,
	                        y1 - C[:,1]]), axis=0)


#===============================================================================
# first returns :

def kac_return_stats(map, disc, samples, horizon, rng_seed, params=None,
                     gate=None):
	"""
	First-return statistics of the disc ``disc = (center, radius)``.  Points
	are drawn uniformly in the disc and iterated until they come back, at
	most ``horizon`` steps; for every return the time ``n_D`` and the lifted
	winding ``l_D`` of the excursion are recorded.

	:rtype: :class:`~rigidity.RigidityReport` with the mean return time, the
	        capped fraction, ``sum l_D / sum n_D`` and the Kac product
	        ``mean n_D * normalized area``
	"""
	params = merge_params(default_rigidity_params(), params,
	                      'rigidity parameters')
	center, radius = np.asarray(disc[0], dtype=float), float(disc[1])
	samples, horizon = int(samples), int(horizon)
	if np.any(_max_radius(map.domain, center[None,:]) < radius):
		raise InvalidParameter("disc must lie inside the domain")

	times = np.zeros(samples, dtype=np.int64)
	winds = np.zeros(samples)
	for i, start, stop in chunks(samples, int(params['chunk'])):
		rng  = np.random.default_rng([int(rng_seed), i])
		u    = rng.random((stop - start, 2))
		r    = radius*np.sqrt(u[:,0])
		t    = 2*np.pi*u[:,1]
		y    = center + np.stack([r*np.cos(t), r*np.sin(t)], axis=-1)
		idx  = np.arange(start, stop)
		wind = np.zeros(len(y))
		for n in range(1, horizon + 1):
			if len(y) == 0:
				break
			if map.has_turns():
				wind = wind + map.turns(y)
			y    = map.eval(y)
			back = map.domain.distance(y, center[None,:]) <= radius
			times[idx[back]] = n
			winds[idx[back]] = wind[back]
			y, idx, wind = y[~back], idx[~back], wind[~back]

	hit    = times > 0
	area   = math.pi*radius**2 / map.domain.area()
	mean   = float(np.mean(times[hit])) if np.any(hit) else None
	ratio  = math.fsum(winds[hit]) / int(np.sum(times[hit])) \
	         if np.any(hit) and map.has_turns() else None
	if gate is None:
		gate = pseudo_rotation_gate(map, params)
	summ = {'center' : center, 'radius' : radius, 'samples' : samples,
	        'horizon' : horizon, 'area' : area, 'mean_return' : mean,
	        'capped_fraction' : float(np.mean(~hit)), 'ratio' : ratio,
	        'rotation_number' : gate.get('value'),
	        'kac_product' : None if mean is None else mean*area,
	        'slack' : params['slack']}
	summ['kac_holds'] = mean is None or summ['kac_product'] <= 1 + params['slack']
	values, counts = np.unique(times, return_counts=True)
	rows = [{'return_time' : int(v), 'count' : int(c)}
	        for v, c in zip(values, counts)]
	rep  = RigidityReport('kac', rows, summ, gate, rng_seed)
	print_text("::: mean return %s, capped %.3f, winding ratio %s :::"
	           % (mean, summ['capped_fraction'], ratio), cls=rep)
	return rep


#===============================================================================
# rigidity along convergents :

def _grid(map, grid):
	if grid is None or np.isscalar(grid):
		return map.domain.grid(24 if grid is None else int(grid))
	return np.asarray(grid, dtype=float)


def _sup_displacement(map, X, q):
	y = X
	for i in range(int(q)):
		y = map.eval(y)
	return float(np.max(map.domain.distance(y, X)))


def holder_bound_log(q, q_next, a, C):
	"""
	``log(q_next^-1/2 + C^q (2 q_next^-1/2)^(a^q))``.
	"""
	t1 = -0.5*math.log(q_next)
	t2 = q*math.log(C) + a**q * (math.log(2) - 0.5*math.log(q_next))
	return float(np.logaddexp(t1, t2))


def holder_rigidity_check(map, alpha, a, C, j_list, grid=None,
                          max_iterations=10**6, gate=None):
	"""
	Tabulate ``||f^q_j - Id||_0`` against
	``q_(j+1)^-1/2 + C^q_j (2 q_(j+1)^-1/2)^(a^q_j)`` along the convergent
	denominators of ``alpha``, with the bound in log domain.  Rows whose
	``q_j`` exceeds ``max_iterations`` are skipped and reported.  The
	super-Liouville profile of ``alpha`` at exponent ``a`` is included.

	:rtype: :class:`~rigidity.RigidityReport`
	"""
	a, C   = float(a), float(C)
	if not 0 < a <= 1 or not C > 0:
		raise InvalidParameter("need a in (0,1] and C > 0, have %g, %g" % (a, C))
	j_list = [int(j) for j in j_list]
	cf     = cf_expand(alpha, max(j_list) + 1)
	X      = _grid(map, grid)
	rows   = []
	for j in j_list:
		q, q1 = cf.q(j), cf.q(j + 1)
		row   = {'j' : j, 'q' : q, 'q_next' : q1}
		lb    = holder_bound_log(q, q1, a, C)
		row['log_bound'] = lb
		try:
			if q > max_iterations:
				raise InfeasibleIterationCount("q_%i = %i exceeds %i iterations"
				                               % (j, q, max_iterations), q=q)
			m = _sup_displacement(map, X, q)
		except InfeasibleIterationCount as e:
			row.update(skipped=True, reason=e.message)
			rows.append(row)
			continue
		with np.errstate(over='ignore'):
			direct = q1**-0.5 + C**q * (2*q1**-0.5)**(a**q)
		row.update(skipped=False, measured=m, holds=m <= math.exp(lb),
		           log_measured=math.log(m) if m > 0 else -np.inf,
		           direct=float(direct) if np.isfinite(direct) else None)
		rows.append(row)
	if gate is None:
		gate = pseudo_rotation_gate(map)
	prof = superliouville_profile(cf, a)
	summ = {'alpha' : cf.alpha.to_string(), 'a' : a, 'C' : C,
	        'profile' : prof.to_dict(),
	        'measured_rows' : len([r for r in rows if not r['skipped']])}
	rep  = RigidityReport('holder', rows, summ, gate)
	print_min_max([r['measured'] for r in rows if not r['skipped']],
	              '::: ||f^q_j - Id||', cls=rep)
	return rep


def nonbrjuno_rigidity_check(map, alpha, H, max_terms, depth=40, grid=None,
                             max_iterations=10**5, ball_samples=32,
                             gate=None):
	"""
	Measure the two estimates of the non-Brjuno rigidity argument along the
	subsequence ``q = q_(n_j)`` of :func:`~arithmetic.nonbrjuno_subsequence` :

	* the growth ``q^-1 log ||Df^q||`` (grid sup) against ``1/j^2``,
	* ``||f^q - Id||_0`` against ``q_(n_j+1)^-1/2 + max_x diam
	  f^q(B(x, q_(n_j+1)^-1/2))``.

	Terms with ``q`` beyond ``max_iterations`` are listed as extrapolated
	and not measured.

	:rtype: :class:`~rigidity.RigidityReport`
	"""
	cf   = cf_expand(alpha, depth)
	sub  = nonbrjuno_subsequence(cf, H, max_terms)
	X    = _grid(map, grid)
	rows = []
	for j, n in enumerate(sub.indices, 1):
		q, q1 = cf.q(n), cf.q(n + 1)
		row   = {'j' : j, 'n' : n, 'q' : q, 'q_next' : q1,
		         'growth_bound' : 1.0 / j**2, 'in_J' : j in sub.flags}
		if q > max_iterations:
			row.update(label='extrapolated')
			rows.append(row)
			continue
		g      = ComposedMap(map, q)
		growth = derivative_growth(map, [q], X).log_norms[0] / q
		s      = q1**-0.5
		disp   = _sup_displacement(map, X, q)
		bound  = s + float(np.max(ball_diameters(g, X, s, ball_samples)))
		row.update(label='measured', growth=growth,
		           growth_ok=growth <= row['growth_bound'],
		           displacement=disp, displacement_bound=bound,
		           displacement_ok=disp <= bound)
		rows.append(row)
	if gate is None:
		gate = pseudo_rotation_gate(map)
	summ = {'alpha' : cf.alpha.to_string(), 'H' : sub.H,
	        'subsequence' : sub.to_dict(),
	        'measured_rows' : len([r for r in rows if r['label'] == 'measured']),
	        'extrapolated_rows' : len([r for r in rows
	                                   if r['label'] == 'extrapolated'])}
	return RigidityReport('nonbrjuno', rows, summ, gate)


#===============================================================================
# growth-gap scan :

def growth_gap_scan(map, q_sequence, theta, H, strict=False, grid=None,
                    goodpoint_params=None, certify_params=None,
                    max_iterations=10**6, threads=None):
	"""
	Scan ``q_1, q_2, ...`` for the first ``n`` with
	``q_n^-1 log ||Df^q_n|| > theta^n`` (grid sup) and hand the hit over to
	the certification pipeline with ``g = f^q_(n-1)`` and
	``q = q_n / q_(n-1)``, or ``g = f`` and ``q = q_1`` at the first index.

	The sequence should satisfy ``q_1 >= H`` and ``q_n >= H^q_(n-1)``;
	violations are recorded, or rejected when ``strict``.  Terms beyond
	``max_iterations`` end the scan with ``truncated = True``.  Pipeline
	failures are recorded as diagnostics.

	:rtype: :class:`~rigidity.RigidityReport`
	"""
	qs    = [int(q) for q in q_sequence]
	lnH   = math.log(float(H))
	viol  = []
	for n, q in enumerate(qs, 1):
		need = lnH if n == 1 else qs[n-2]*lnH
		if math.log(q) < need - 1e-12:
			viol.append(n)
	if strict and len(viol) > 0:
		raise InvalidParameter("q sequence violates q_n >= H^q_(n-1) at %s"
		                       % viol, violations=viol)
	X       = _grid(map, grid)
	rows    = []
	hit     = None
	outcome = None
	trunc   = False
	for n, q in enumerate(qs, 1):
		if q > max_iterations:
			trunc = True
			break
		try:
			rate = derivative_growth(map, [q], X, threads).log_norms[0] / q
		except DomainEscape as e:
			rows.append({'n' : n, 'q' : q, 'escaped' : e.index})
			continue
		rows.append({'n' : n, 'q' : q, 'rate' : rate, 'threshold' : theta**n,
		             'hit' : rate > theta**n})
		if rate > theta**n:
			hit = n
			break

	if hit is not None:
		if hit == 1:
			g, qg = map, qs[0]
		else:
			g, qg = ComposedMap(map, qs[hit-2]), qs[hit-1] // qs[hit-2]
		print_text("::: growth gap at n = %i, certifying g with q = %i :::"
		           % (hit, qg), '213')
		try:
			cert    = search_and_certify(g, qg, 'auto', goodpoint_params,
			                             certify_params, threads)
			outcome = {'certified' : True, 'certificate' : cert.to_dict()}
		except ClslvrError as e:
			if not isinstance(e, StageError):
				e = StageError('pipeline', e)
			outcome = {'certified' : False, 'error' : e.to_dict()}
	summ = {'theta' : theta, 'H' : H, 'q_sequence' : qs, 'hit' : hit,
	        'violations' : viol, 'truncated' : trunc, 'outcome' : outcome}
	return RigidityReport('gap', rows, summ)
