"""
The tangent cocycle along orbits.

A :class:`TangentTriple` ``(x, v_s, v_u)`` is pushed along the orbit of ``x``
and the one-step log-stretches ``lambda_s``, ``lambda_u`` of the two unit
frames are recorded in a :class:`CocycleTrace`.  From these sequences the
module decides forward and backward goodness of triples, selects the Pliss
indices of a sequence, and searches orbits for (q,a)-good points : two
orbit indices whose triples nearly coincide while the exponent averages in
between stay above ``(1 - slack) a``.
"""
from clslvr.helper      import InvalidParameter, InvalidTriple, \
                               DegenerateSpectrum, PreconditionViolated, \
                               ConsequenceViolated, BoundViolated, \
                               DomainEscape, NewtonDiverged, NotFound, \
                               perp, inv2, cot_angle, vector_angle, \
                               singular_values2, top_singular_vectors, \
                               accumulate_product, parallel_map, \
                               default_threads, merge_params
from clslvr.inputoutput import print_text, print_params
from clslvr.maps        import Orbit, iterate, periodic_cycle, \
                               newton_periodic, map_from_dict
import numpy                as np
import bisect
import math

SLACK = 1.0 / 1000


#===============================================================================
# triples and traces :

class TangentTriple(object):
	"""
	A base point with two unit tangent vectors, ``v_s`` the candidate stable
	direction and ``v_u`` the candidate unstable one.

	Triples built by :func:`most_contracting` carry an ``anchor`` : the
	horizon ``q`` and the left singular vector ``u_min`` of ``Dg^q(x)``, from
	which :func:`trace` recovers the stable frames by backward recursion.

	:param base: the base point
	:param v_s: unit vector
	:param v_u: unit vector, not parallel to ``v_s``
	:param anchor: singular data of ``Dg^q(x)``, or ``None``
	:param degenerate: ``True`` when the singular values of ``Dg^q(x)`` agree
	:raises InvalidTriple: if a vector is not unit or the pair is parallel
	"""
	def __init__(self, base, v_s, v_u, anchor=None, degenerate=False):
		self.base       = np.asarray(base, dtype=float)
		self.v_s        = np.asarray(v_s,  dtype=float)
		self.v_u        = np.asarray(v_u,  dtype=float)
		self.anchor     = anchor
		self.degenerate = bool(degenerate)
		for name, v in (('v_s', self.v_s), ('v_u', self.v_u)):
			n = float(np.linalg.norm(v))
			if abs(n - 1) > 1e-12:
				raise InvalidTriple("%s has norm %.17g, not 1" % (name, n),
				                    norm=n)
		angle = float(vector_angle(self.v_s, self.v_u))
		if min(angle, math.pi - angle) <= 1e-15:
			raise InvalidTriple("v_s and v_u are parallel", angle=angle)

	def color(self):
		"""
		return the default color for this class.
		"""
		return '180'

	@classmethod
	def orthonormal(cls, base, v_s):
		"""
		The triple ``(base, v_s, v_s^perp)`` for a nonzero vector ``v_s``.
		"""
		v_s = np.asarray(v_s, dtype=float)
		v_s = v_s / np.linalg.norm(v_s)
		return cls(base, v_s, perp(v_s))

	def to_dict(self):
		"""
		:rtype: dict
		"""
		d = {'base' : self.base, 'v_s' : self.v_s, 'v_u' : self.v_u,
		     'degenerate' : self.degenerate}
		if self.anchor is not None:
			d['anchor'] = self.anchor
		return d


class CocycleTrace(object):
	"""
	Frames and one-step exponents along an orbit segment of ``L`` steps.

	``v_s[i]`` and ``v_u[i]`` are the unit frames at ``x_i`` for
	``i = 0, ..., L`` and ``lambda_s[i] = log ||Dg(x_i) v_s[i]||`` (same for
	``u``) for ``i = 0, ..., L-1``.  Derived sequences :

	* ``lambda_bar_e = min(lambda_u, -lambda_s)``,
	* ``lambda_e = min(lambda_u, lambda_u - lambda_s, -2 lambda_s)``,
	* ``cot_angle``, the absolute cotangent of the frame angle, length ``L+1``.

	:param points: orbit points, shape ``(L+1, 2)``
	:param v_s: stable frames, shape ``(L+1, 2)``
	:param v_u: unstable frames, shape ``(L+1, 2)``
	:param lambda_s: stable exponents, shape ``(L,)``
	:param lambda_u: unstable exponents, shape ``(L,)``
	:param offset: orbit index of the first point
	"""
	def __init__(self, points, v_s, v_u, lambda_s, lambda_u, offset=0):
		self.points       = np.asarray(points,   dtype=float)
		self.v_s          = np.asarray(v_s,      dtype=float)
		self.v_u          = np.asarray(v_u,      dtype=float)
		self.lambda_s     = np.asarray(lambda_s, dtype=float)
		self.lambda_u     = np.asarray(lambda_u, dtype=float)
		self.offset       = int(offset)
		self.length       = len(self.lambda_s)
		self.lambda_bar_e = np.minimum(self.lambda_u, -self.lambda_s)
		self.lambda_e     = np.minimum(np.minimum(self.lambda_u,
		                                          self.lambda_u - self.lambda_s),
		                               -2*self.lambda_s)
		self.cot_angle    = cot_angle(self.v_s, self.v_u)

	def color(self):
		"""
		return the default color for this class.
		"""
		return '180'

	def segment(self, start, stop):
		"""
		The sub-trace over orbit steps ``start, ..., stop-1`` (indices relative
		to this trace), with frames at ``start, ..., stop``.

		:rtype: :class:`~cocycle.CocycleTrace`
		"""
		start, stop = int(start), int(stop)
		if not 0 <= start <= stop <= self.length:
			raise InvalidParameter("segment [%i, %i] outside trace of length %i"
			                       % (start, stop, self.length))
		return CocycleTrace(self.points[start:stop+1], self.v_s[start:stop+1],
		                    self.v_u[start:stop+1], self.lambda_s[start:stop],
		                    self.lambda_u[start:stop], self.offset + start)

	def to_dict(self):
		"""
		:rtype: dict
		"""
		return {'offset'   : self.offset,
		        'points'   : self.points,
		        'v_s'      : self.v_s,
		        'v_u'      : self.v_u,
		        'lambda_s' : self.lambda_s,
		        'lambda_u' : self.lambda_u}

	@classmethod
	def from_dict(cls, d):
		"""
		Rebuild a trace from :meth:`to_dict` output.
		"""
		return cls(d['points'], d['v_s'], d['v_u'], d['lambda_s'],
		           d['lambda_u'], d.get('offset', 0))


def _propagate(mats, v0):
	# push the unit vector v0 through mats[0], mats[1], ..., renormalizing :
	a, b   = float(v0[0]), float(v0[1])
	frames = [(a, b)]
	logs   = []
	for m00, m01, m10, m11 in np.reshape(mats, (-1, 4)).tolist():
		x, y = m00*a + m01*b, m10*a + m11*b
		r    = math.hypot(x, y)
		logs.append(math.log(r))
		a, b = x/r, y/r
		frames.append((a, b))
	return np.array(frames), np.array(logs)


def _line_angle(u, v):
	# angle between the lines spanned by u and v, in [0, pi/2] :
	t = vector_angle(u, v)
	return np.minimum(t, np.pi - t)


#===============================================================================
# most contracting direction and traces :

def most_contracting(map, x, q, orbit=None, strict=False):
	"""
	The triple at ``x`` whose stable vector is the most contracted direction
	of ``Dg^q(x)`` and whose unstable vector is its orthogonal complement.

	The product ``Dg^q(x)`` is accumulated with renormalization, so any ``q``
	is admissible; the smaller singular value is recovered from the
	determinant.  When both singular values agree to within ``1e-14`` the
	direction is arbitrary : the triple ``(x, e_2, -e_1)`` is returned with
	``degenerate = True``, or :class:`DegenerateSpectrum` is raised if
	``strict``.

	:param map: the map
	:param x: base point
	:param q: horizon
	:param orbit: precomputed orbit of ``x`` of length at least ``q``
	:param strict: raise on a degenerate spectrum instead of flagging it
	:raises DomainEscape: if the orbit leaves the domain
	:rtype: :class:`~cocycle.TangentTriple`
	"""
	q = int(q)
	if q < 1:
		raise InvalidParameter("horizon q must be positive, not %i" % q)
	if orbit is None:
		orbit = iterate(map, x, q)
	elif orbit.length < q:
		raise InvalidParameter("orbit of length %i is shorter than q = %i"
		                       % (orbit.length, q))

	P, log_s, log_det = accumulate_product(orbit.jacobians[:q])
	s_max, s_min      = [float(s) for s in singular_values2(P)]
	log_max           = log_s + math.log(s_max)
	log_min           = log_det - log_max
	base              = orbit.points[0]

	if s_max - s_min <= 1e-14 * s_max:
		if strict:
			raise DegenerateSpectrum("singular values of Dg^%i agree at %s"
			                         % (q, list(base)), log_sigma=log_max)
		print_text("::: degenerate spectrum of Dg^%i, frame flagged :::" % q,
		           '180')
		anchor = {'horizon' : q, 'log_sigma_max' : log_max,
		          'log_sigma_min' : log_min}
		return TangentTriple(base, [0.0, 1.0], [-1.0, 0.0], anchor=anchor,
		                     degenerate=True)

	v_max, u_max = top_singular_vectors(P)
	v_s          = perp(v_max)
	anchor       = {'horizon'       : q,
	                'u_min'         : perp(u_max),
	                'log_sigma_max' : log_max,
	                'log_sigma_min' : log_min}
	return TangentTriple(base, v_s, perp(v_s), anchor=anchor)


def trace(map, triple, L, orbit=None):
	"""
	Push the frames of ``triple`` along ``L`` steps of its orbit.

	The unstable frame is propagated forward.  The stable frame of an
	anchored triple is obtained by backward recursion
	``w_i = Dg(x_i)^-1 w_{i+1} / ||.||`` from ``u_min`` at the horizon, with
	``lambda_s[i] = -log ||Dg(x_i)^-1 w_{i+1}||``; beyond the horizon, and for
	triples without anchor, it is propagated forward.

	:param map: the map
	:param triple: the starting triple
	:param L: number of steps
	:param orbit: precomputed orbit of the base point
	:raises DomainEscape: if the orbit leaves the domain
	:rtype: :class:`~cocycle.CocycleTrace`
	"""
	L       = int(L)
	if L < 0:
		raise InvalidParameter("trace length must be nonnegative, not %i" % L)
	anchor  = None
	if triple.anchor is not None and not triple.degenerate:
		anchor = triple.anchor
	horizon = anchor['horizon'] if anchor is not None else 0
	need    = max(L, horizon)
	if orbit is None:
		orbit = iterate(map, triple.base, need)
	elif orbit.length < need:
		raise InvalidParameter("orbit of length %i is shorter than %i"
		                       % (orbit.length, need))
	J = orbit.jacobians

	if anchor is not None:
		q          = horizon
		w, logs    = _propagate(inv2(J[:q])[::-1], anchor['u_min'])
		w          = w[::-1]
		lam_s      = -logs[::-1]
		if np.dot(w[0], triple.v_s) < 0:
			w = -w
		if L <= q:
			v_s   = w[:L+1]
			lam_s = lam_s[:L]
		else:
			w_ext, l_ext = _propagate(J[q:L], w[q])
			v_s          = np.concatenate([w, w_ext[1:]])
			lam_s        = np.concatenate([lam_s, l_ext])
	else:
		v_s, lam_s = _propagate(J[:L], triple.v_s)

	v_u, lam_u = _propagate(J[:L], triple.v_u)
	return CocycleTrace(orbit.points[:L+1], v_s, v_u, lam_s, lam_u)


#===============================================================================
# Pliss selection :

def pliss_indices(seq, l, l_prime, l_second):
	"""
	Every index ``i`` from which all forward window averages
	``(1/k) sum_{j=i}^{i+k-1} seq[j]`` exceed ``l_second``.

	With ``D[m] = sum_{j<m} (seq[j] - l_second)`` an index is selected exactly
	when ``D[i] < min_{m>i} D[m]``, which one suffix-minimum sweep decides in
	linear time.  When every term is at most ``l`` and the mean exceeds
	``l_prime``, at least ``(l_prime - l_second)/(l - l_second) n`` indices
	are selected.

	:param seq: nonempty real sequence
	:param l: upper bound of the terms
	:param l_prime: lower bound of the mean
	:param l_second: window threshold, ``l_second < l_prime < l``
	:raises PreconditionViolated: naming the failing hypothesis
	:raises ConsequenceViolated: if fewer indices than guaranteed are found
	:rtype: list of int
	"""
	seq = np.asarray(seq, dtype=float)
	n   = len(seq)
	if n == 0:
		raise PreconditionViolated("empty sequence", inequality='n >= 1')
	if not l_second < l_prime < l:
		raise PreconditionViolated("need l'' < l' < l, have %g, %g, %g"
		                           % (l_second, l_prime, l),
		                           inequality="l'' < l' < l")
	i_max = int(np.argmax(seq))
	if seq[i_max] > l:
		raise PreconditionViolated("seq[%i] = %.17g exceeds l = %g"
		                           % (i_max, seq[i_max], l),
		                           inequality='seq[i] <= l', index=i_max)
	mean = float(np.mean(seq))
	if not mean > l_prime:
		raise PreconditionViolated("mean %.17g does not exceed l' = %g"
		                           % (mean, l_prime),
		                           inequality="mean > l'")

	D        = np.concatenate([[0.0], np.cumsum(seq - l_second)])
	suffix   = np.minimum.accumulate(D[::-1])[::-1]
	selected = [int(i) for i in np.nonzero(D[:-1] < suffix[1:])[0]]

	bound = (l_prime - l_second) / (l - l_second) * n
	if len(selected) < bound - 1e-9:
		raise ConsequenceViolated("%i indices selected, at least %.6g "
		                          "guaranteed" % (len(selected), bound),
		                          selected=len(selected), bound=bound)
	return selected


#===============================================================================
# good triples :

class TripleCheck(object):
	"""
	Outcome of :func:`check_good_triple`.  Truthy when the triple is good;
	otherwise ``failure`` describes the earliest violated inequality.
	"""
	def __init__(self, ok, direction, L, a, cap, slack, failure=None):
		self.ok        = ok
		self.direction = direction
		self.L         = L
		self.a         = a
		self.cap       = cap
		self.slack     = slack
		self.failure   = failure

	def __bool__(self):
		return self.ok

	def to_dict(self):
		"""
		:rtype: dict
		"""
		return {'ok' : self.ok, 'direction' : self.direction, 'L' : self.L,
		        'a' : self.a, 'cap' : self.cap, 'slack' : self.slack,
		        'failure' : self.failure}


def _oriented(trace, L, direction):
	# the first L steps read forward, or the last L steps read backward :
	if direction == 'forward':
		sl = slice(0, L)
		return (trace.lambda_s[sl], trace.lambda_u[sl], trace.lambda_bar_e[sl],
		        trace.lambda_e[sl])
	elif direction == 'backward':
		sl = slice(trace.length - L, trace.length)
		return (trace.lambda_s[sl][::-1], trace.lambda_u[sl][::-1],
		        trace.lambda_bar_e[sl][::-1], trace.lambda_e[sl][::-1])
	raise InvalidParameter("direction must be 'forward' or 'backward', not "
	                       "'%s'" % direction)


def check_good_triple(trace, L, a, direction='forward', slack=SLACK, cap=None):
	"""
	Decide whether the triple at the start (``forward``) or at the end
	(``backward``) of ``trace`` is ``(L, a)``-good.

	Forward : ``|lambda_s[j]|, |lambda_u[j]| <= cap`` for ``0 <= j < L`` and
	``(1/k) sum_{j<k} lambda_bar_e[j] > (1 - slack) a`` for ``1 <= k <= L``.
	Backward : the same over the last ``L`` steps, windows ending at the
	trace end.  The earliest failure is reported, exponent bounds before the
	average of the same window.

	:param trace: a trace of at least ``L`` steps
	:param L: window length
	:param a: averaging level
	:param direction: ``'forward'`` or ``'backward'``
	:param slack: the relative slack of the average threshold
	:param cap: exponent bound, ``a`` by default
	:rtype: :class:`~cocycle.TripleCheck`
	"""
	L   = int(L)
	a   = float(a)
	cap = a if cap is None else float(cap)
	if not 1 <= L <= trace.length:
		raise InvalidParameter("window L = %i outside [1, %i]"
		                       % (L, trace.length))
	ls, lu, lbe, le = _oriented(trace, L, direction)

	thr     = (1 - slack) * a
	avg     = np.cumsum(lbe) / np.arange(1, L+1)
	bad_exp = (np.abs(ls) > cap) | (np.abs(lu) > cap)
	bad_avg = ~(avg > thr)
	bad     = bad_exp | bad_avg
	if not np.any(bad):
		return TripleCheck(True, direction, L, a, cap, slack)

	m = int(np.argmax(bad))
	if bad_exp[m]:
		j       = m if direction == 'forward' else -1 - m
		failure = {'kind'      : 'exponent',
		           'index'     : j,
		           'value'     : float(max(abs(ls[m]), abs(lu[m]))),
		           'threshold' : cap}
	else:
		failure = {'kind'      : 'average',
		           'k'         : m + 1,
		           'value'     : float(avg[m]),
		           'threshold' : thr}
	return TripleCheck(False, direction, L, a, cap, slack, failure)


def consequence_thresholds(a, cap=None, slack=SLACK):
	"""
	Thresholds implied by goodness with exponent bound ``cap`` and slack
	``slack``.  For ``cap = a`` and ``slack = 1/1000`` they are ``-a/2``,
	``(1 - 1/100) a`` and ``-a/10``.

	:rtype: dict
	"""
	a     = float(a)
	cap   = a if cap is None else float(cap)
	nu    = max(0.0, 1 - (1 - slack)*a/cap)
	thr_e = min((1 - 1.0/100)*a, (1 - slack)*a - 3*cap*nu)
	nu_e  = max(0.0, 1 - thr_e/cap)
	thr_3 = min(-a/10, -6*cap*nu_e)
	return {'lambda_s' : -a/2, 'lambda_e' : thr_e, 'min_3lambda_e' : thr_3}


class ConsequenceReport(object):
	"""
	Margins of the averaged inequalities implied by goodness, per direction.
	A margin is the smallest gap, over all windows, between the average and
	its threshold, positive when the inequality holds.
	"""
	def __init__(self, L, a, cap, slack, thresholds, margins):
		self.L          = L
		self.a          = a
		self.cap        = cap
		self.slack      = slack
		self.thresholds = thresholds
		self.margins    = margins

	def to_dict(self):
		"""
		:rtype: dict
		"""
		return {'L' : self.L, 'a' : self.a, 'cap' : self.cap,
		        'slack' : self.slack, 'thresholds' : self.thresholds,
		        'margins' : self.margins}


def good_consequences(trace, L, a, slack=SLACK, cap=None,
                      directions=('forward', 'backward')):
	"""
	Check, over every window ``1 <= k <= L`` and in every direction, the
	averaged inequalities that goodness implies :

	* ``(1/k) sum lambda_s < -a/2``,
	* ``(1/k) sum lambda_e > thr_e``,
	* ``(1/k) sum min(3 lambda_e, 0) > thr_3``,

	with the thresholds of :func:`consequence_thresholds`.

	:raises PreconditionViolated: if the trace is not good in a direction
	:raises ConsequenceViolated: if an implied inequality fails
	:rtype: :class:`~cocycle.ConsequenceReport`
	"""
	a   = float(a)
	cap = a if cap is None else float(cap)
	for d in directions:
		check = check_good_triple(trace, L, a, d, slack, cap)
		if not check:
			raise PreconditionViolated("trace is not %s (L,a)-good" % d,
			                           failure=check.failure)

	thr     = consequence_thresholds(a, cap, slack)
	k       = np.arange(1, int(L) + 1)
	margins = {}
	for d in directions:
		ls, lu, lbe, le = _oriented(trace, int(L), d)
		m = {'lambda_s'      : float(np.min(thr['lambda_s']
		                                    - np.cumsum(ls)/k)),
		     'lambda_e'      : float(np.min(np.cumsum(le)/k
		                                    - thr['lambda_e'])),
		     'min_3lambda_e' : float(np.min(np.cumsum(np.minimum(3*le, 0))/k
		                                    - thr['min_3lambda_e']))}
		margins[d] = m
		failed     = sorted(n for n, v in m.items() if not v > 0)
		if len(failed) > 0:
			raise ConsequenceViolated("%s consequences fail : %s"
			                          % (d, ', '.join(failed)),
			                          direction=d, margins=m)
	return ConsequenceReport(int(L), a, cap, slack, thr, margins)


#===============================================================================
# angle control :

class CotEnvelope(object):
	"""
	The measured ``|cot|`` of the frame angle and the envelope
	``E_{i+1} = e^{2 lambda_s[i]} E_i + A^2`` started from ``E_0 = |cot_0|``.
	"""
	def __init__(self, A, values, envelope, margins):
		self.A        = A
		self.values   = values
		self.envelope = envelope
		self.margins  = margins
		self.terminal = float(values[-1])
		self.terminal_below_A3 = bool(self.terminal <= A**3)

	def to_dict(self):
		"""
		:rtype: dict
		"""
		return {'A' : self.A, 'values' : self.values,
		        'envelope' : self.envelope,
		        'min_margin' : float(np.min(self.margins))
		                       if len(self.margins) else None,
		        'terminal' : self.terminal,
		        'terminal_below_A3' : self.terminal_below_A3}


def cot_recursion_bound(trace, A):
	"""
	Verify ``|cot_{i+1}| <= e^{2 lambda_s[i]} |cot_i| + A^2`` at every step of
	``trace``, with a relative slack of ``1e-8``; it holds for any
	area-preserving map with ``||Dg|| <= A`` along the orbit.

	:param trace: the trace
	:param A: bound on ``||Dg||``
	:raises BoundViolated: with the first failing step
	:rtype: :class:`~cocycle.CotEnvelope`
	"""
	A  = float(A)
	A2 = A*A
	c  = np.abs(trace.cot_angle)
	with np.errstate(over='ignore', invalid='ignore'):
		grow = np.exp(2*trace.lambda_s)
		rhs  = grow*c[:-1] + A2
	bad = c[1:] > rhs + 1e-8*(1 + rhs)
	if np.any(bad):
		i = int(np.argmax(bad))
		raise BoundViolated("cotangent recursion fails at step %i : %.6g > "
		                    "%.6g" % (i, c[i+1], rhs[i]), step=i,
		                    lhs=float(c[i+1]), rhs=float(rhs[i]))
	env = [float(c[0])]
	for g in grow.tolist():
		env.append(g*env[-1] + A2)
	env = np.array(env)
	return CotEnvelope(A, c, env, rhs - c[1:])


#===============================================================================
# good indices in an orbit :

def _good_index_scan(lambda_bar_e, thr):
	# forward(n) : D[n] < min_{m>n} D[m] ; backward(n) : max_{m<n} D[m] < D[n]
	D    = np.concatenate([[0.0], np.cumsum(lambda_bar_e - thr)])
	q    = len(lambda_bar_e)
	smin = np.minimum.accumulate(D[::-1])[::-1]
	pmax = np.maximum.accumulate(D)
	fwd  = np.nonzero(D[:q] < smin[1:])[0]
	bwd  = np.nonzero(pmax[:q] < D[1:])[0] + 1
	return [int(n) for n in fwd], [int(n) for n in bwd]


def good_index_bruteforce(lambda_bar_e, thr):
	"""
	Quadratic reference for the good-index scan : every window is tested.

	:rtype: tuple ``(forward, backward)`` index lists
	"""
	D   = np.concatenate([[0.0], np.cumsum(np.asarray(lambda_bar_e) - thr)])
	q   = len(lambda_bar_e)
	fwd = [n for n in range(q)
	       if all(D[n+k] - D[n] > 0 for k in range(1, q - n + 1))]
	bwd = [n for n in range(1, q + 1)
	       if all(D[n] - D[n-k] > 0 for k in range(1, n + 1))]
	return fwd, bwd


class GoodInOrbit(object):
	"""
	Indices of an orbit of length ``q`` whose triples are good in the orbit :
	forward windows up to the orbit end, backward windows down to its start,
	and both (restricted to ``1 <= n <= q-1``).  Densities are measured, not
	asserted.
	"""
	def __init__(self, q, a, slack, forward, backward, triple, trace):
		self.q        = q
		self.a        = a
		self.slack    = slack
		self.forward  = forward
		self.backward = backward
		both          = set(forward) & set(backward)
		self.indices  = sorted(n for n in both if 1 <= n <= q - 1)
		self.triple   = triple
		self.trace    = trace
		span          = float(max(q - 1, 1))
		self.density  = {'forward'  : len(forward) / float(q),
		                 'backward' : len(backward) / float(q),
		                 'both'     : len(self.indices) / span}

	def to_dict(self):
		"""
		:rtype: dict
		"""
		return {'q' : self.q, 'a' : self.a, 'slack' : self.slack,
		        'indices' : self.indices, 'density' : self.density,
		        'degenerate' : self.triple.degenerate}


def good_in_orbit(map, x, q, a, slack=SLACK, orbit=None):
	"""
	Indices ``n`` in ``[1, q-1]`` of the orbit of ``x`` such that every
	window average of ``lambda_bar_e`` starting at ``n`` (up to ``q``) and
	every one ending at ``n`` (down to ``0``) exceeds ``(1 - slack) a``.  The
	triple is seeded by :func:`most_contracting` at horizon ``q``.

	:raises DomainEscape: if the orbit leaves the domain
	:rtype: :class:`~cocycle.GoodInOrbit`
	"""
	q = int(q)
	if orbit is None:
		orbit = iterate(map, x, q)
	triple   = most_contracting(map, x, q, orbit=orbit)
	tr       = trace(map, triple, q, orbit=orbit)
	fwd, bwd = _good_index_scan(tr.lambda_bar_e, (1 - slack)*float(a))
	res      = GoodInOrbit(q, float(a), slack, fwd, bwd, triple, tr)
	print_text("::: good in orbit : %i of %i indices (density %.3f) :::"
	           % (len(res.indices), q - 1, res.density['both']), '180')
	return res


#===============================================================================
# seed refinement :

class RefinedSeed(object):
	"""
	A search seed, with the hyperbolic cycle Newton found near it, if any.
	"""
	def __init__(self, seed, point=None, period=None, residual=None,
	             monodromy_trace=None):
		self.seed     = np.asarray(seed, dtype=float)
		self.point    = point
		self.period   = period
		self.residual = residual
		self.monodromy_trace = monodromy_trace

	def to_dict(self):
		"""
		:rtype: dict
		"""
		return {'seed' : self.seed, 'point' : self.point,
		        'period' : self.period, 'residual' : self.residual,
		        'monodromy_trace' : self.monodromy_trace}


def refine_periodic_seeds(map, seeds, max_period=4, threads=None):
	"""
	Newton-refine every seed to a hyperbolic cycle of period at most
	``max_period``, trying periods in increasing order.  A cycle is
	hyperbolic when ``|tr Dg^p| > 2``.  Seeds without one keep ``period =
	None`` and are iterated plainly by the search.

	:rtype: list of :class:`~cocycle.RefinedSeed`
	"""
	def refine(seed):
		for p in range(1, int(max_period) + 1):
			try:
				z, res, it = newton_periodic(map, seed, p)
			except NewtonDiverged:
				continue
			cycle, jac, res = periodic_cycle(map, z, p)
			P, log_s, _     = accumulate_product(jac)
			if log_s > 700:
				tr = np.inf
			else:
				tr = math.exp(log_s) * (P[0,0] + P[1,1])
			if abs(tr) > 2 + 1e-9:
				return RefinedSeed(seed, z, p, res, float(tr))
		return RefinedSeed(seed)

	refined = parallel_map(refine, np.atleast_2d(seeds), threads)
	n_cyc   = len([r for r in refined if r.period is not None])
	print_text("::: %i of %i seeds refined to hyperbolic cycles :::"
	           % (n_cyc, len(refined)), '180')
	return refined


#===============================================================================
# (q,a)-good points :

def default_goodpoint_params():
	"""
	Parameters of the good-point search.  ``match_radius`` and ``cap``
	default to ``min(q^-1/100, 1e-3)`` and ``max(a, log d1_bound)`` when
	``None``; ``min_return`` may be ``'auto'`` for
	``ceil(ln 100 / ((1 - 1/100 - slack) a))``.
	"""
	return {'seeds'          : 32,
	        'refine'         : False,
	        'max_period'     : 4,
	        'match_radius'   : None,
	        'min_return'     : 1,
	        'slack'          : SLACK,
	        'cap'            : None,
	        'max_candidates' : 16}


def auto_min_return(a, slack=SLACK):
	"""
	Smallest return time for which the averaged contraction reaches
	``ln 100`` : ``ceil(ln 100 / ((1 - 1/100 - slack) a))``.

	:rtype: int
	"""
	return max(1, int(math.ceil(math.log(100) / ((1 - 0.01 - slack)*a))))


def goodpoint_checks(trace, a, cap, slack, match_radius, domain):
	"""
	The four conditions on the triple at the start of ``trace`` with return
	time ``L = trace.length`` :

	1. forward ``(L, a)``-good,
	2. backward ``(L, a)``-good at the return point,
	3. ``log |cot|`` of the frame angle at most ``3 cap`` at both ends,
	4. both frame distances below ``match_radius``, where the distance is
	   the angle between lines plus the chart distance of the base points.

	``cap`` plays the role of ``log A`` for a bound ``A`` on ``||Dg||``, so
	condition 3 is the angle bound of the exponent cap, not of ``a``.  The
	stricter ``log |cot| <= 3 a`` is recorded as ``angles_at_a`` and not
	enforced.

	:rtype: dict
	"""
	L          = trace.length
	fwd        = check_good_triple(trace, L, a, 'forward',  slack, cap)
	bwd        = check_good_triple(trace, L, a, 'backward', slack, cap)
	with np.errstate(divide='ignore'):
		angle_logs = [float(np.log(trace.cot_angle[0])),
		              float(np.log(trace.cot_angle[L]))]
	chart      = float(domain.distance(trace.points[L], trace.points[0]))
	d_s        = float(_line_angle(trace.v_s[0], trace.v_s[L])) + chart
	d_u        = float(_line_angle(trace.v_u[0], trace.v_u[L])) + chart
	return {'forward'     : fwd,
	        'backward'    : bwd,
	        'angles'      : all(v <= 3*cap for v in angle_logs),
	        'angles_at_a' : all(v <= 3*a for v in angle_logs),
	        'distances'   : d_s < match_radius and d_u < match_radius,
	        'angle_logs'  : angle_logs,
	        'distance'    : [d_s, d_u]}


class GoodPointCertificate(object):
	"""
	A (q,a)-good point : the triple at orbit index ``start`` of seed
	``seed_index`` is forward ``(L,a)``-good, its return after ``L`` steps is
	backward ``(L,a)``-good, the frame angles are controlled at both ends
	and the returning frames lie within ``match_radius``.  The stored trace
	segment holds every number the four conditions are evaluated on.

	``cap`` is the exponent bound, ``max(a, log d1_bound)`` unless given; it
	stands for ``log A`` with ``A`` bounding ``||Dg||``, which is why the
	angle condition reads ``3 cap`` and the stated ``a`` may be smaller.
	``refined`` tells whether the orbit is a Newton-refined cycle laid end
	to end rather than a plain orbit of a seed.
	"""
	SCHEMA = 'clslvr-goodpoint/1'

	def __init__(self, map, seed_index, start, q, a, cap, slack,
	             match_radius, trace, period=None, residual=0.0,
	             refined=False):
		self.map          = map
		self.seed_index   = seed_index
		self.start        = start
		self.q            = q
		self.a            = a
		self.cap          = cap
		self.slack        = slack
		self.match_radius = match_radius
		self.trace        = trace
		self.period       = period
		self.residual     = residual
		self.refined      = bool(refined)
		self.L            = trace.length
		self.base         = trace.points[0]
		checks            = goodpoint_checks(trace, a, cap, slack,
		                                     match_radius, map.domain)
		self.angle_logs   = checks['angle_logs']
		self.angles_at_a  = checks['angles_at_a']
		self.distances    = checks['distance']

	def color(self):
		"""
		return the default color for this class.
		"""
		return '180'

	@property
	def frames(self):
		"""
		The frames ``(v_s, v_u)`` at the base and at the return point.
		"""
		return {'start'  : (self.trace.v_s[0],  self.trace.v_u[0]),
		        'return' : (self.trace.v_s[-1], self.trace.v_u[-1])}

	def to_dict(self):
		"""
		:rtype: dict
		"""
		return {'schema'       : self.SCHEMA,
		        'map'          : self.map.to_dict(),
		        'seed_index'   : self.seed_index,
		        'start'        : self.start,
		        'q'            : self.q,
		        'a'            : self.a,
		        'cap'          : self.cap,
		        'slack'        : self.slack,
		        'match_radius' : self.match_radius,
		        'L'            : self.L,
		        'base'         : self.base,
		        'period'       : self.period,
		        'residual'     : self.residual,
		        'refined'      : self.refined,
		        'angle_logs'   : self.angle_logs,
		        'angles_at_a'  : self.angles_at_a,
		        'distances'    : self.distances,
		        'trace'        : self.trace.to_dict()}

	@classmethod
	def from_dict(cls, d):
		"""
		Rebuild a certificate from :meth:`to_dict` output.
		"""
		if d.get('schema') != cls.SCHEMA:
			raise InvalidParameter("not a good-point certificate : schema %s"
			                       % d.get('schema'))
		return cls(map_from_dict(d['map']), d['seed_index'], d['start'],
		           d['q'], d['a'], d['cap'], d['slack'], d['match_radius'],
		           CocycleTrace.from_dict(d['trace']), d.get('period'),
		           d.get('residual', 0.0), d.get('refined', False))


def verify_goodpoint(cert, tol=1e-9):
	"""
	Re-check the four conditions of ``cert`` from its stored trace, and
	check that the stored exponents and frames agree with the Jacobians of
	the map at the stored points to within ``tol``.

	:rtype: dict
	"""
	tr     = cert.trace
	checks = goodpoint_checks(tr, cert.a, cert.cap, cert.slack,
	                          cert.match_radius, cert.map.domain)
	J      = cert.map.jacobian(tr.points[:-1])
	ok_exp = True
	for v, lam in ((tr.v_s, tr.lambda_s), (tr.v_u, tr.lambda_u)):
		img  = np.einsum('nij,nj->ni', J, v[:-1])
		nrm  = np.linalg.norm(img, axis=1)
		turn = _line_angle(img / nrm[:,None], v[1:])
		if len(lam) and (np.max(np.abs(np.log(nrm) - lam)) > tol or
		                 np.max(turn) > tol):
			ok_exp = False
	report = {'forward'     : bool(checks['forward']),
	          'backward'    : bool(checks['backward']),
	          'angles'      : checks['angles'],
	          'angles_at_a' : checks['angles_at_a'],
	          'distances'   : checks['distances'],
	          'exponents'   : ok_exp,
	          'angle_logs'  : checks['angle_logs'],
	          'distance'    : checks['distance']}
	report['ok'] = all(report[k] for k in ('forward', 'backward', 'angles',
	                                       'distances', 'exponents'))
	return report


def _seed_orbit(map, seed, q):
	if isinstance(seed, RefinedSeed):
		if seed.period is not None:
			return Orbit.periodic(map, seed.point, seed.period, q)
		seed = seed.seed
	return iterate(map, seed, q)


def _cells(points, v_s, v_u, size, domain):
	# hash coordinates : position and the two line angles.  A periodic axis
	# is cut into a whole number of cells at least size wide, and its cell
	# indices are taken modulo that number :
	v_s   = np.asarray(v_s, dtype=float)
	v_u   = np.asarray(v_u, dtype=float)
	ang_s = np.mod(np.arctan2(v_s[:,1], v_s[:,0]), np.pi)
	ang_u = np.mod(np.arctan2(v_u[:,1], v_u[:,0]), np.pi)
	X     = np.column_stack([domain.wrap(points), ang_s, ang_u])
	axes  = list(domain.periodic_axes()) + [(0.0, np.pi), (0.0, np.pi)]
	width = np.full(4, float(size))
	mods  = [None]*4
	for i, ax in enumerate(axes):
		if ax is None:
			continue
		origin, period = ax
		mods[i]  = max(int(period // size), 1)
		width[i] = period / mods[i]
		X[:,i]   = X[:,i] - origin
	X    = X / width
	cell = np.floor(X)
	side = np.where(X - cell < 0.5, -1, 1)
	cell = cell.astype(np.int64)
	for i, n in enumerate(mods):
		if n is not None:
			cell[:,i] = np.mod(cell[:,i], n)
	return cell.tolist(), side.tolist(), mods


def _neighbor_keys(cell, side, mods):
	keys = [()]
	for c, s, n in zip(cell, side, mods):
		other = c + s if n is None else (c + s) % n
		keys  = [k + (c,) for k in keys] + [k + (other,) for k in keys]
	return list(dict.fromkeys(keys))


def _scan_seed(map, index, seed, q, a, radius, min_return, slack, cap,
               max_candidates):
	stats = {'seed' : index, 'escaped' : None, 'forward' : 0, 'backward' : 0,
	         'candidates' : 0, 'rejected' : {}, 'buckets' : {}}
	try:
		orbit = _seed_orbit(map, seed, q)
	except DomainEscape as e:
		stats['escaped'] = e.index
		return None, stats

	triple = most_contracting(map, orbit.points[0], q, orbit=orbit)
	if a == 'auto':
		a_i = triple.anchor['log_sigma_max'] / q
	else:
		a_i = float(a)
	stats['a'] = a_i
	if not a_i > 0:
		return None, stats
	cap_i = max(a_i, math.log(map.d1_bound)) if cap is None else float(cap)
	ret_i = auto_min_return(a_i, slack) if min_return == 'auto' \
	        else max(int(min_return), 1)

	tr       = trace(map, triple, q, orbit=orbit)
	fwd, bwd = _good_index_scan(tr.lambda_bar_e, (1 - slack)*a_i)
	stats['forward']  = len(fwd)
	stats['backward'] = len(bwd)
	is_fwd   = set(fwd)
	is_bwd   = set(bwd)

	# buckets twice the radius wide : a neighbor within the radius lies in
	# the own cell or in the adjacent one on the nearer side, per coordinate
	cells, sides, mods = _cells(tr.points, tr.v_s, tr.v_u, 2*radius,
	                            map.domain)
	buckets      = {}
	budget       = 256 * max_candidates
	for n in sorted(is_fwd | is_bwd):
		if n in is_bwd and n >= ret_i:
			cand = []
			for key in _neighbor_keys(cells[n], sides[n], mods):
				b = buckets.get(key, [])
				i = bisect.bisect_right(b, n - ret_i)
				cand.extend(b[max(0, i - max_candidates):i])
			for m in sorted(cand, reverse=True)[:max_candidates]:
				if stats['candidates'] >= budget:
					stats['exhausted'] = True
					stats['buckets']   = _histogram(buckets)
					return None, stats
				stats['candidates'] += 1
				seg    = tr.segment(m, n)
				checks = goodpoint_checks(seg, a_i, cap_i, slack, radius,
				                          map.domain)
				failed = [k for k in ('forward', 'backward', 'angles',
				                      'distances') if not checks[k]]
				if len(failed) == 0:
					cert = GoodPointCertificate(map, index, m, q, a_i, cap_i,
					                            slack, radius, seg,
					                            orbit.period, orbit.residual,
					                            orbit.period is not None)
					stats['buckets'] = _histogram(buckets)
					return cert, stats
				for k in failed:
					stats['rejected'][k] = stats['rejected'].get(k, 0) + 1
		if n in is_fwd:
			buckets.setdefault(tuple(cells[n]), []).append(n)
	stats['buckets'] = _histogram(buckets)
	return None, stats


def _histogram(buckets):
	# bucket occupancy, sizes of 16 and more pooled :
	h = {}
	for b in buckets.values():
		k    = str(len(b)) if len(b) < 16 else '16+'
		h[k] = h.get(k, 0) + 1
	return h


def find_good_point(map, seeds, q, a, match_radius=None, min_return=1,
                    slack=SLACK, cap=None, max_candidates=16, threads=None):
	"""
	Search the orbits of ``seeds`` for a (q,a)-good point.

	For every seed the triple is seeded by :func:`most_contracting` at
	horizon ``q`` and traced over ``q`` steps.  The forward-good indices are
	inserted, in orbit order, into a spatial hash over position and the two
	frame line angles; each backward-good index ``n`` looks up the nearby
	buckets for forward-good ``m <= n - min_return`` and verifies up to
	``max_candidates`` pairs, closest in time first, with
	:func:`goodpoint_checks`.  Seeds are scanned in batches of ``threads``
	and the certificate of the lowest seed index wins, so the result does
	not depend on the thread count.

	:param map: the map
	:param seeds: points, or :class:`RefinedSeed` whose cycles are tiled
	:param q: orbit length
	:param a: averaging level, or ``'auto'`` for the measured growth
	          ``log ||Dg^q|| / q`` of each seed
	:param match_radius: frame distance tolerance, ``min(q^-1/100, 1e-3)``
	                     by default
	:param min_return: smallest admitted return time, or ``'auto'``
	:param slack: relative slack of the goodness threshold
	:param cap: exponent bound, ``max(a, log d1_bound)`` by default
	:rtype: :class:`~cocycle.GoodPointCertificate` or
	        :class:`~helper.NotFound`
	"""
	q = int(q)
	if q < 2:
		raise InvalidParameter("orbit length q must be at least 2, not %i" % q)
	if match_radius is None:
		match_radius = min(q**-0.01, 1e-3)
	match_radius = float(match_radius)
	if not match_radius > 0:
		raise InvalidParameter("match radius must be positive, not %g"
		                       % match_radius)
	seeds   = list(seeds)
	threads = default_threads() if threads is None else max(int(threads), 1)

	s = "::: searching %i seeds for a (q,a)-good point, q = %i, a = %s, " \
	    "radius = %.3e :::" % (len(seeds), q, a, match_radius)
	print_text(s, '180')

	all_stats = []
	for b0 in range(0, len(seeds), threads):
		batch = list(range(b0, min(b0 + threads, len(seeds))))
		out   = parallel_map(lambda i : _scan_seed(map, i, seeds[i], q, a,
		                                           match_radius, min_return,
		                                           slack, cap, max_candidates),
		                     batch, threads)
		for cert, stats in out:
			all_stats.append(stats)
			if cert is not None:
				print_text("::: good point at seed %i, index %i, L = %i, "
				           "distances (%.3e, %.3e) :::"
				           % (cert.seed_index, cert.start, cert.L,
				              cert.distances[0], cert.distances[1]),
				           cls=cert)
				return cert

	hist = {}
	for st in all_stats:
		for k, v in st['buckets'].items():
			hist[k] = hist.get(k, 0) + v
	statistics = {'seeds'      : len(seeds),
	              'escaped'    : [st['seed'] for st in all_stats
	                              if st['escaped'] is not None],
	              'forward'    : [st['forward']  for st in all_stats],
	              'backward'   : [st['backward'] for st in all_stats],
	              'candidates' : sum(st['candidates'] for st in all_stats),
	              'exhausted'  : [st['seed'] for st in all_stats
	                              if st.get('exhausted')],
	              'rejected'   : _merge_counts(st['rejected']
	                                           for st in all_stats),
	              'histogram'  : hist}
	print_text(">>> no (q,a)-good point among %i seeds <<<" % len(seeds),
	           '180')
	return NotFound("no matching good-in-orbit pair", statistics)


def _merge_counts(dicts):
	total = {}
	for d in dicts:
		for k, v in d.items():
			total[k] = total.get(k, 0) + v
	return total


def goodpoint_search(map, q, a, params=None, threads=None):
	"""
	The full search : Halton seeds over the domain, optional Newton
	refinement to hyperbolic cycles, and :func:`find_good_point`.  Seeds
	are iterated plainly unless ``params['refine']`` is set; the
	certificate records which of both produced it.

	:param map: the map
	:param q: orbit length
	:param a: averaging level or ``'auto'``
	:param params: overrides of :func:`default_goodpoint_params`
	:rtype: :class:`~cocycle.GoodPointCertificate` or
	        :class:`~helper.NotFound`
	"""
	params = merge_params(default_goodpoint_params(), params,
	                      'good point parameters')
	print_params('good point search', params, color='180')
	seeds  = map.domain.halton(int(params['seeds']))
	if params['refine']:
		seeds = refine_periodic_seeds(map, seeds, params['max_period'],
		                              threads)
	return find_good_point(map, seeds, q, a,
	                       match_radius   = params['match_radius'],
	                       min_return     = params['min_return'],
	                       slack          = params['slack'],
	                       cap            = params['cap'],
	                       max_candidates = params['max_candidates'],
	                       threads        = threads)
