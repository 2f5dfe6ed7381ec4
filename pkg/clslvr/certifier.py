"""
From a (q,a)-good point to a hyperbolic periodic point.

The orbit segment of a :class:`~cocycle.GoodPointCertificate` is read in the
moving frames ``i_n(a, b) = a v_n^u + b v_n^s``.  Along it a schedule of boxes
``U_n = U(r_n, tau_n, kappa_n)`` and cones ``C(kappa_n)``,
``C~(kappa~_n)`` is built in log domain, the one-step cone inequalities are
verified, a vertical strip of ``U_0`` mapped by the return map onto a
horizontal strip of ``U_0`` is constructed, and the fixed point inside
their intersection is located by Newton iteration, its degree and spectrum
checked.

Every check compares logarithms : with the large-scale ``M = 1000`` the box
sizes ``D^-3M`` underflow every floating-point format, and the geometry is
then skipped while the inequalities are still decided.  The numeric regime
is floating-point sampling plus analytic sufficient inequalities, without
directed rounding.
"""
from clslvr.helper      import ClslvrError, ScheduleCheckFailed, \
                               DegenerateFrame, ConeCheckFailed, \
                               StripConstructionFailed, ReturnMapTooFar, \
                               DegreeZero, NonHyperbolicSpectrum, \
                               InvalidParameter, BudgetExceeded, StageError, \
                               NotFound, \
                               log_add, log_sub, log1p_exp, inv2, det2, \
                               norm2, singular_values2, accumulate_product, \
                               parallel_map, merge_params
from clslvr.inputoutput import print_text, print_min_max, print_params
from clslvr.maps        import newton_periodic
from clslvr.cocycle     import GoodPointCertificate, verify_goodpoint, \
                               goodpoint_search
from more_itertools     import pairwise
import numpy                as np
import math

LOG10  = math.log(10.0)
LOG100 = math.log(100.0)
TOL    = 1e-12


def _lse(*terms):
	# log(sum(exp(terms))), -inf terms dropped :
	return float(np.logaddexp.reduce(np.array(terms, dtype=float)))


def _log(x):
	with np.errstate(divide='ignore'):
		return float(np.log(x))


def default_certify_params():
	"""
	Parameters of :func:`certify`.  ``M`` is ``'auto'`` or an integer;
	``'auto'`` takes the smallest ``M`` in ``[M_min, M_max]`` whose schedule
	passes.  ``return_tol`` ``None`` stands for ``0.01 kappa_bar``.
	"""
	return {'M'                : 'auto',
	        'M_min'            : 4,
	        'M_max'            : 64,
	        'D_floor'          : 2.0,
	        'cone_mode'        : 'analytic',
	        'cone_samples'     : 5,
	        'geometry_floor'   : 1e-9,
	        'return_tol'       : None,
	        'newton_tol'       : 1e-10,
	        'newton_max_iter'  : 100,
	        'strip_points'     : 17,
	        'strip_budget'     : 65536,
	        'degree_half_side' : 1e-7}


#===============================================================================
# boxes :

class Box(object):
	"""
	The box ``U(r, tau, kappa) = {(v,w) : |v| <= r, |w| <= tau + kappa|v|}``.

	:raises InvalidParameter: unless ``r, tau > 0`` and ``0 < kappa < 1``
	"""
	def __init__(self, r, tau, kappa):
		if not (r > 0 and tau > 0 and 0 < kappa < 1):
			raise InvalidParameter("box needs r, tau > 0 and 0 < kappa < 1, "
			                       "have %g, %g, %g" % (r, tau, kappa))
		self.r     = float(r)
		self.tau   = float(tau)
		self.kappa = float(kappa)

	def half_height(self, v):
		return self.tau + self.kappa*np.abs(v)

	def contains(self, p):
		p = np.asarray(p, dtype=float)
		return (np.abs(p[...,0]) <= self.r) & \
		       (np.abs(p[...,1]) <= self.half_height(p[...,0]))

	def grid(self, n):
		"""
		``n x n`` points : ``v`` uniform in ``[-r, r]``, ``w`` uniform between
		the horizontal boundaries above ``v``.
		"""
		v, t = np.meshgrid(np.linspace(-1, 1, n)*self.r, np.linspace(-1, 1, n))
		return np.stack([v.ravel(), t.ravel()*self.half_height(v.ravel())],
		                axis=-1)

	def to_dict(self):
		"""
		:rtype: dict
		"""
		return {'r' : self.r, 'tau' : self.tau, 'kappa' : self.kappa}

	@classmethod
	def from_dict(cls, d):
		return cls(d['r'], d['tau'], d['kappa'])


class Strip(object):
	"""
	A strip of a box bounded by two full graphs.  ``graphs`` holds the
	polylines ordered left to right (vertical strips, each sampled from the
	lower to the upper boundary) or lower to upper (horizontal strips, each
	sampled from left to right); ``lipschitz`` their largest segment slopes,
	``|dv/dw|`` or ``|dw/dv|``.
	"""
	def __init__(self, parent, kind, graphs, lipschitz):
		if kind not in ('vertical', 'horizontal'):
			raise InvalidParameter("strip kind must be 'vertical' or "
			                       "'horizontal', not '%s'" % kind)
		self.parent    = parent
		self.kind      = kind
		self.graphs    = [np.asarray(g, dtype=float) for g in graphs]
		self.lipschitz = [float(l) for l in lipschitz]

	def _piece(self, v0, v1, sign, n):
		v = np.linspace(v0, v1, n)
		if (v0 < 0 < v1 or v1 < 0 < v0) and not np.any(v == 0):
			v = np.sort(np.append(v, 0.0))
			if v0 > v1:
				v = v[::-1]
		return np.stack([v, sign*self.parent.half_height(v)], axis=-1)

	def boundary(self, n=9):
		"""
		The closed boundary polygon, counter-clockwise, first point repeated.
		"""
		lo, hi = self.graphs
		if self.kind == 'vertical':
			bottom = self._piece(lo[0,0],  hi[0,0],  -1, n)
			top    = self._piece(hi[-1,0], lo[-1,0],  1, n)
			parts  = [bottom, hi[1:], top[1:], lo[::-1][1:]]
		else:
			r      = self.parent.r
			right  = np.stack([np.full(n, r),  np.linspace(lo[-1,1], hi[-1,1], n)],
			                  axis=-1)
			left   = np.stack([np.full(n, -r), np.linspace(hi[0,1], lo[0,1], n)],
			                  axis=-1)
			parts  = [lo, right[1:], hi[::-1][1:], left[1:]]
		return np.concatenate(parts)

	def samples(self, n=3):
		"""
		Points of the strip : graph vertices and ``n`` points across it.
		"""
		lo, hi = self.graphs
		m      = min(len(lo), len(hi))
		il     = np.linspace(0, len(lo) - 1, m).astype(int)
		ih     = np.linspace(0, len(hi) - 1, m).astype(int)
		s      = np.linspace(0, 1, n)
		pts    = lo[il][:,None,:]*(1 - s)[None,:,None] \
		         + hi[ih][:,None,:]*s[None,:,None]
		return pts.reshape(-1, 2)

	def to_dict(self):
		"""
		:rtype: dict
		"""
		return {'parent' : self.parent.to_dict(), 'kind' : self.kind,
		        'graphs' : self.graphs, 'lipschitz' : self.lipschitz}

	@classmethod
	def from_dict(cls, d):
		return cls(Box.from_dict(d['parent']), d['kind'], d['graphs'],
		           d['lipschitz'])


#===============================================================================
# schedule :

C0_FORMULA = "C0 = max_n (1 + |cos t_n|) (1 - |cos t_(n+1)|)^(-1/2) d2 " \
             "/ (D max(|cot t_(n+1)|, 1)), t_n the frame angle at x_n"


def chart_constant(trace, d2_bound, D):
	"""
	Constant ``C0`` with ``||D^2 g_n|| <= C0 D max(|cot t_(n+1)|, 1)`` for the
	step maps in the moving frames : with unit frame vectors at angle ``t``,
	``||i_n|| = sqrt(1 + |cos t_n|)`` and
	``||i_n^-1|| = (1 - |cos t_n|)^(-1/2)``, and
	``||D^2 g_n|| <= ||i_(n+1)^-1|| ||i_n||^2 d2``.

	:rtype: float
	"""
	if trace.length == 0 or d2_bound == 0:
		return 0.0
	c    = np.minimum(np.abs(np.sum(trace.v_s*trace.v_u, axis=-1)), 1.0)
	with np.errstate(divide='ignore'):
		inv = 1.0 / np.sqrt(1 - c)
	vals = (1 + c[:-1]) * inv[1:] * d2_bound \
	       / (D * np.maximum(trace.cot_angle[1:], 1.0))
	return float(np.max(vals))


class BoxSchedule(object):
	"""
	Box and cone parameters along a trace of ``L`` steps, in log domain :

	* ``delta = a/100``, ``r_bar = D^-3M``, ``kappa_bar = D^-M``,
	  ``beta_bar = D^M``,
	* ``c_0 = 1``, ``c_(n+1) = min(e^(lambda_e[n] - delta) c_n, 100)``,
	* ``r_n = r_bar c_n^3``, ``tau_n = e^(sum_(i<n) lambda_s[i] + delta) r_bar``,
	* ``kappa_n = kappa_bar / c_n``, ``kappa~_n = kappa_bar c_n``,
	  ``beta_n = beta_bar / c_n``,
	* ``eps_n = 2 C0 D beta_(n+1) r_n (1 + kappa_n)``.

	The constructor evaluates every check and stores the failures;
	:func:`build_schedule` raises on them.
	"""
	def __init__(self, trace, a, D, M, C0, geometry_floor=1e-9):
		self.trace      = trace
		self.L          = trace.length
		self.a          = float(a)
		self.D          = float(D)
		self.M          = int(M)
		self.C0         = float(C0)
		self.delta      = self.a / 100
		self.geometry_floor = float(geometry_floor)
		lD              = math.log(self.D)
		self.log_D      = lD
		self.log_r_bar     = -3*self.M*lD
		self.log_kappa_bar = -self.M*lD
		self.log_beta_bar  =  self.M*lD

		lc = [0.0]
		for le in trace.lambda_e.tolist():
			lc.append(min(le - self.delta + lc[-1], LOG100))
		lc = np.array(lc)
		self.log_c           = lc
		self.log_r           = self.log_r_bar + 3*lc
		self.log_tau         = self.log_r_bar + np.concatenate(
		                       [[0.0], np.cumsum(trace.lambda_s + self.delta)])
		self.log_kappa       = self.log_kappa_bar - lc
		self.log_kappa_tilde = self.log_kappa_bar + lc
		self.log_beta        = self.log_beta_bar - lc
		with np.errstate(divide='ignore'):
			self.log_cot = np.log(trace.cot_angle)

		if self.C0 > 0:
			l1k = np.array([log1p_exp(k) for k in self.log_kappa[:-1]])
			self.log_eps = math.log(2*self.C0) + lD + self.log_beta[1:] \
			               + self.log_r[:-1] + l1k
		else:
			self.log_eps = np.full(self.L, -np.inf)

		self.geometry = bool(self.log_r_bar >= math.log(self.geometry_floor))
		self.margins, self.failures = self._checks()

	def color(self):
		"""
		return the default color for this class.
		"""
		return '208'

	def _checks(self):
		L  = self.L
		lD = self.log_D
		m  = {}
		# identities of the log representation :
		ident = np.max(np.abs(np.concatenate([
		          self.log_kappa + self.log_kappa_tilde - 2*self.log_kappa_bar,
		          self.log_beta + self.log_c - self.log_beta_bar,
		          self.log_r - self.log_r_bar - 3*self.log_c])))
		m['identities']  = -ident
		m['beta']        = self.log_beta - np.maximum(self.log_cot, 0)
		m['c_L']         = self.log_c[L] - LOG100
		m['tau_L']       = self.log_r_bar - LOG10 - self.log_tau[L]
		m['r_tau']       = self.log_r - self.log_tau
		m['epsilon']     = -0.5*self.M*lD + self.log_kappa_bar - self.log_eps
		m['epsilon_kappa'] = -self.M*lD + self.log_kappa_bar \
		                     - (self.log_eps + self.log_kappa[:L])
		m['epsilon_kappa_tilde'] = -self.M*lD + self.log_kappa_bar \
		                           - (self.log_eps + self.log_kappa_tilde[:L])

		failures = []
		scale    = 1 + abs(self.log_r_bar)
		for name in sorted(m):
			vals = np.atleast_1d(m[name])
			tol  = TOL*scale
			bad  = np.nonzero(~(vals >= -tol))[0]
			for i in bad.tolist():
				failures.append({'check'  : name,
				                 'index'  : i if np.ndim(m[name]) else None,
				                 'margin' : float(vals[i])})
		return m, failures

	def box(self, n):
		"""
		The box ``U_n``, or ``None`` below the geometry floor.

		:rtype: :class:`~certifier.Box`
		"""
		if not self.geometry:
			return None
		return Box(math.exp(self.log_r[n]), math.exp(self.log_tau[n]),
		           math.exp(self.log_kappa[n]))

	def min_margins(self):
		"""
		Smallest margin of every check.
		"""
		return dict((k, float(np.min(np.atleast_1d(v))) if np.size(v) else None)
		            for k, v in self.margins.items())

	def to_dict(self):
		"""
		:rtype: dict
		"""
		return {'L'               : self.L,
		        'a'               : self.a,
		        'D'               : self.D,
		        'log_D'           : self.log_D,
		        'M'               : self.M,
		        'C0'              : self.C0,
		        'C0_formula'      : C0_FORMULA,
		        'delta'           : self.delta,
		        'log_r_bar'       : self.log_r_bar,
		        'log_kappa_bar'   : self.log_kappa_bar,
		        'log_beta_bar'    : self.log_beta_bar,
		        'geometry'        : self.geometry,
		        'geometry_floor'  : self.geometry_floor,
		        'log_c'           : self.log_c,
		        'min_margins'     : self.min_margins(),
		        'failures'        : self.failures}


def build_schedule(trace, a, D, M, C0, geometry_floor=1e-9):
	"""
	Build the box schedule of ``trace`` and check :

	* ``beta_n >= max(|cot|, 1)`` for ``0 <= n <= L``,
	* ``c_L = 100``, ``tau_L <= r_bar/10`` and ``r_n >= tau_n``,
	* ``eps_n <= D^(-M/2) kappa_bar``, ``eps_n kappa_n <= D^-M kappa_bar``
	  and ``eps_n kappa~_n <= D^-M kappa_bar``,
	* the log identities ``kappa_n kappa~_n = kappa_bar^2``,
	  ``beta_n c_n = beta_bar`` and ``r_n = r_bar c_n^3``.

	:raises ScheduleCheckFailed: listing every failed inequality with its
	                             index and margin; the schedule is attached
	:rtype: :class:`~certifier.BoxSchedule`
	"""
	s = BoxSchedule(trace, a, D, M, C0, geometry_floor)
	if len(s.failures) > 0:
		raise ScheduleCheckFailed(s.failures, s)
	return s


def schedule_for(map, good_point, params=None):
	"""
	The schedule of a good point with ``D = max(d2, d1, e^a, D_floor)`` and
	``M`` from ``params``; ``M = 'auto'`` scans ``[M_min, M_max]`` and keeps
	the first passing value.  Scanning stops early when a check that does
	not depend on ``M`` fails.

	:raises ScheduleCheckFailed: for the last schedule tried
	:rtype: :class:`~certifier.BoxSchedule`
	"""
	params = merge_params(default_certify_params(), params,
	                      'certification parameters')
	tr     = good_point.trace
	a      = good_point.a
	log_D  = max(math.log(params['D_floor']), math.log(map.d1_bound), a,
	             math.log(map.d2_bound) if map.d2_bound > 0 else -np.inf)
	D      = math.exp(log_D)
	C0     = chart_constant(tr, map.d2_bound, D)
	floor  = params['geometry_floor']

	if params['M'] != 'auto':
		return build_schedule(tr, a, D, int(params['M']), C0, floor)

	fixed = set(['c_L', 'tau_L', 'r_tau', 'identities'])
	for M in range(int(params['M_min']), int(params['M_max']) + 1):
		s = BoxSchedule(tr, a, D, M, C0, floor)
		if len(s.failures) == 0:
			print_text("::: schedule passes with M = %i, D = %.6g, C0 = %.6g :::"
			           % (M, D, C0), cls=s)
			return s
		if any(f['check'] in fixed for f in s.failures):
			break
	raise ScheduleCheckFailed(s.failures, s)


#===============================================================================
# moving frames :

class FrameMap(object):
	"""
	The chart ``(a, b) -> x_n + a v^u + b v^s`` at an orbit point and its
	inverse.  Points are translated with the domain chart arithmetic.
	"""
	def __init__(self, point, v_u, v_s, domain=None):
		self.point   = np.asarray(point, dtype=float)
		self.matrix  = np.column_stack([v_u, v_s]).astype(float)
		self.domain  = domain
		if det2(self.matrix) == 0:
			raise DegenerateFrame("frame vectors are parallel at %s"
			                      % list(self.point))
		self.inverse = inv2(self.matrix)

	def embed(self, p):
		"""
		Point of the domain with frame coordinates ``p``.
		"""
		d = np.einsum('ij,...j->...i', self.matrix, np.asarray(p, dtype=float))
		if self.domain is None:
			return self.point + d
		return self.domain.translate(self.point, d)

	def chart(self, y):
		"""
		Frame coordinates of the domain point ``y``.
		"""
		y = np.asarray(y, dtype=float)
		d = y - self.point if self.domain is None \
		    else self.domain.difference(y, self.point)
		return np.einsum('ij,...j->...i', self.inverse, d)

	def condition(self):
		"""
		Condition number ``s_max / s_min`` of the frame matrix.
		"""
		s_max, s_min = singular_values2(self.matrix)
		return float(s_max / s_min)

	def aligned(self, other):
		"""
		The same chart with column signs matching ``other``.
		"""
		m = self.matrix.copy()
		for j in range(2):
			if np.dot(m[:,j], other.matrix[:,j]) < 0:
				m[:,j] = -m[:,j]
		return FrameMap(self.point, m[:,0], m[:,1], self.domain)


def frame_map(trace, n, domain=None, log_beta_bar=None):
	"""
	The moving frame chart ``i_n`` at ``x_n``.

	:param trace: the trace
	:param n: orbit index, at most ``trace.length``
	:param domain: chart domain for translations, flat plane if ``None``
	:param log_beta_bar: reject frames with ``log |cot| > log_beta_bar``
	:raises DegenerateFrame: for parallel or too oblique frames
	:rtype: :class:`~certifier.FrameMap`
	"""
	n = int(n)
	if not 0 <= n <= trace.length:
		raise InvalidParameter("frame index %i outside [0, %i]"
		                       % (n, trace.length))
	if log_beta_bar is not None:
		lc = _log(trace.cot_angle[n])
		if lc > log_beta_bar:
			raise DegenerateFrame("log |cot| = %.6g at n = %i exceeds log "
			                      "beta_bar = %.6g" % (lc, n, log_beta_bar),
			                      index=n, log_cot=lc)
	return FrameMap(trace.points[n], trace.v_u[n], trace.v_s[n], domain)


def step_chart(map, src, dst, p):
	"""
	The step map ``g_n = i_(n+1)^-1 g i_n`` between the frame charts
	``src`` and ``dst``.
	"""
	return dst.chart(map.eval(src.embed(p)))


def step_derivative(map, src, dst, p):
	"""
	``Dg_n(p) = i_(n+1)^-1 Dg(i_n(p)) i_n``.
	"""
	J = map.jacobian(src.embed(p))
	return np.einsum('ij,...jk,kl->...il', dst.inverse, J, src.matrix)


class ReturnMap(object):
	"""
	The composed maps of a good point segment of ``L`` steps in the frame
	charts at ``x_0`` and at ``x_L`` (the latter sign-aligned with the
	former) :

	* ``G'(p) = i_L^-1 g^L i_0(p)``,
	* ``I(p) = i_0^-1 i_L(p)``, the change of chart,
	* ``G = I G' = i_0^-1 g^L i_0``.
	"""
	def __init__(self, map, trace):
		self.map    = map
		self.trace  = trace
		self.L      = trace.length
		self.start  = frame_map(trace, 0, map.domain)
		self.end    = frame_map(trace, self.L, map.domain).aligned(self.start)

	def _power(self, y):
		for i in range(self.L):
			y = self.map.eval(y)
		return y

	def _power_jacobian(self, y):
		y = np.asarray(y, dtype=float)
		P = np.broadcast_to(np.identity(2), y.shape[:-1] + (2,2)).copy()
		for i in range(self.L):
			P = np.einsum('...ij,...jk->...ik', self.map.jacobian(y), P)
			y = self.map.eval(y)
		return P

	def G_prime(self, p):
		return self.end.chart(self._power(self.start.embed(p)))

	def G(self, p):
		return self.start.chart(self._power(self.start.embed(p)))

	def DG(self, p):
		J = self._power_jacobian(self.start.embed(p))
		return np.einsum('ij,...jk,kl->...il', self.start.inverse, J,
		                 self.start.matrix)

	def DG_prime(self, p):
		J = self._power_jacobian(self.start.embed(p))
		return np.einsum('ij,...jk,kl->...il', self.end.inverse, J,
		                 self.start.matrix)

	def I(self, p):
		return self.start.chart(self.end.embed(p))

	def DI(self):
		return np.dot(self.start.inverse, self.end.matrix)


#===============================================================================
# cone checks :

class StepReport(object):
	"""
	Margins of the one-step inequalities at index ``n``.  ``crossing`` and
	``sampled_crossing`` are recorded but not enforced.
	"""
	def __init__(self, n, mode, margins):
		self.n       = n
		self.mode    = mode
		self.margins = margins

	def to_dict(self):
		"""
		:rtype: dict
		"""
		d = {'n' : self.n, 'mode' : self.mode}
		d.update(self.margins)
		return d


def _cone_slopes(M, vecs):
	# log |second| - log |first| of the images M vecs, per point and vector :
	img = np.einsum('...ij,vj->...vi', M, vecs)
	with np.errstate(divide='ignore'):
		return np.log(np.abs(img[...,1])) - np.log(np.abs(img[...,0]))


def cone_step_check(map, trace, schedule, n, mode='analytic', samples=5,
                    frames=None):
	"""
	Verify the step ``n`` inequalities with ``A = e^lambda_u[n]``,
	``B = e^lambda_s[n]`` and ``eps = eps_n`` :

	* ``kappa_(n+1) > (B kappa_n + eps + eps kappa_n)
	  / (A - eps - eps kappa_n)`` (strict),
	* ``tau_(n+1) > (B + eps + eps rho) tau_n`` with ``rho`` the right side
	  above (strict),
	* ``kappa~_(n+1) <= (kappa~_n A - eps kappa~_n - eps)
	  / (B + eps + eps kappa~_n)``.

	The crossing margin ``(A - eps - eps kappa_n) r_n - eps tau_n`` against
	``r_(n+1)`` is recorded only.  In ``'sampled'`` mode ``Dg_n`` is also
	evaluated at a grid of ``U_n`` : images of the boundary vectors of
	``C(kappa_n)`` must lie in ``C(kappa_(n+1))`` and preimages of those of
	``C~(kappa~_(n+1))`` in ``C~(kappa~_n)``.

	:raises ConeCheckFailed: with the index, the inequality and its margin
	:rtype: :class:`~certifier.StepReport`
	"""
	n  = int(n)
	s  = schedule
	if not 0 <= n < s.L:
		raise InvalidParameter("step %i outside [0, %i)" % (n, s.L))
	if mode not in ('analytic', 'sampled'):
		raise InvalidParameter("cone check mode must be 'analytic' or "
		                       "'sampled', not '%s'" % mode)
	lA   = float(trace.lambda_u[n])
	lB   = float(trace.lambda_s[n])
	le   = float(s.log_eps[n])
	lk   = s.log_kappa[n]
	lk1  = s.log_kappa[n+1]
	lkt  = s.log_kappa_tilde[n]
	lkt1 = s.log_kappa_tilde[n+1]

	lden = log_sub(lA, le + log1p_exp(lk))
	if not lden > -np.inf:
		lrho = np.inf
	else:
		lrho = _lse(lB + lk, le, le + lk) - lden
	m = {}
	m['kappa']       = lk1 - lrho
	m['tau']         = s.log_tau[n+1] - (_lse(lB, le, le + lrho) + s.log_tau[n])
	lnum2            = log_sub(lkt + lA, log_add(le + lkt, le))
	m['kappa_tilde'] = (lnum2 - _lse(lB, le, le + lkt)) - lkt1 \
	                   if lnum2 == lnum2 else -np.inf
	lcross           = log_sub(lden + s.log_r[n], le + s.log_tau[n]) \
	                   if lden > -np.inf else float('nan')
	m['crossing']    = lcross - s.log_r[n+1] if lcross == lcross else -np.inf

	scale = 1 + abs(s.log_r_bar)
	for name, strict in (('kappa', True), ('tau', True),
	                     ('kappa_tilde', False)):
		v   = m[name]
		bad = not v > TOL*scale if strict else not v >= -TOL*scale
		if bad:
			raise ConeCheckFailed("step %i : %s inequality fails, margin %.6g"
			                      % (n, name, v), index=n, inequality=name,
			                      margin=float(v))

	if mode == 'sampled':
		if frames is None:
			src = frame_map(trace, n,   map.domain)
			dst = frame_map(trace, n+1, map.domain)
		else:
			src, dst = frames[n], frames[n+1]
		r    = math.exp(s.log_r[n])
		tau  = math.exp(s.log_tau[n])
		kap  = math.exp(lk)
		v, t = np.meshgrid(np.linspace(-1, 1, samples)*r,
		                   np.linspace(-1, 1, samples))
		v    = v.ravel()
		P    = np.stack([v, t.ravel()*(tau + kap*np.abs(v))], axis=-1)
		DG   = step_derivative(map, src, dst, P)
		fwd  = _cone_slopes(DG, np.array([[1.0, kap], [1.0, -kap]]))
		kt1  = math.exp(lkt1)
		bwd  = -_cone_slopes(inv2(DG), np.array([[kt1, 1.0], [-kt1, 1.0]]))
		m['sampled_forward']  = float(np.min(lk1 - fwd))
		m['sampled_backward'] = float(np.min(lkt - bwd))
		edge = np.stack([np.concatenate([np.full(samples, r),
		                                 np.full(samples, -r)]),
		                 np.tile(np.linspace(-1, 1, samples)*(tau + kap*r), 2)],
		                axis=-1)
		vbar = np.abs(step_chart(map, src, dst, edge)[:,0])
		m['sampled_crossing'] = float(np.min(np.log(vbar)) - s.log_r[n+1]) \
		                        if np.all(vbar > 0) else -np.inf
		for name in ('sampled_forward', 'sampled_backward'):
			if not m[name] > 0:
				raise ConeCheckFailed("step %i : %s cone check fails, margin "
				                      "%.6g" % (n, name, m[name]), index=n,
				                      inequality=name, margin=m[name])
	return StepReport(n, mode, m)


#===============================================================================
# return map :

class ReturnReport(object):
	"""
	Deviation of the change of chart ``I`` from the identity and the margins
	of its cone and clearance conditions.
	"""
	def __init__(self, deviation_c1, log_deviation_c0, log_threshold, margins):
		self.deviation_c1     = deviation_c1
		self.log_deviation_c0 = log_deviation_c0
		self.log_threshold    = log_threshold
		self.margins          = margins

	def to_dict(self):
		"""
		:rtype: dict
		"""
		return {'deviation_c1'     : self.deviation_c1,
		        'log_deviation_c0' : self.log_deviation_c0,
		        'log_threshold'    : self.log_threshold,
		        'margins'          : self.margins}


def return_map_check(map, trace, schedule, tol=None, ret=None):
	"""
	Measure ``I = i_0^-1 i_L`` against the identity over ``U_L``.  The flat
	chart makes ``DI`` constant, so ``||DI - id||`` and ``||DI^-1 - id||``
	are exact, and ``||I - id||`` over ``U_L`` is bounded by
	``|i_0^-1 (x_L - x_0)| + ||DI - id|| (r_L + tau_L + kappa_L r_L)``.
	Checks, in log domain :

	* the larger of both deviations is at most ``tol`` (``0.01 kappa_bar``
	  by default),
	* ``DI`` maps ``C(kappa_bar/100)`` into ``C(kappa_bar/2)`` and ``DI^-1``
	  maps ``C~(2 kappa_bar)`` into ``C~(100 kappa_bar)``,
	* the image of the vertical boundary of ``U_L`` clears ``U_0`` :
	  ``r_L - dev >= 10 r_bar``.

	:raises ReturnMapTooFar: with the measured deviation
	:rtype: :class:`~certifier.ReturnReport`
	"""
	s   = schedule
	L   = s.L
	ret = ReturnMap(map, trace) if ret is None else ret
	DI  = ret.DI()
	I2  = np.identity(2)
	dev = max(float(norm2(DI - I2)), float(norm2(inv2(DI) - I2)))
	d   = ret.start.chart(trace.points[L])
	ld  = _log(np.linalg.norm(d))
	lrL = _lse(s.log_r[L], s.log_tau[L], s.log_kappa[L] + s.log_r[L])
	ldev0 = log_add(ld, _log(dev) + lrL)
	lthr  = math.log(tol) if tol is not None \
	        else math.log(0.01) + s.log_kappa_bar

	lkb   = s.log_kappa_bar
	kb    = math.exp(lkb)
	fwd   = _cone_slopes(DI, np.array([[1.0, kb/100], [1.0, -kb/100]]))
	bwd   = -_cone_slopes(inv2(DI), np.array([[2*kb, 1.0], [-2*kb, 1.0]]))
	clear = log_sub(s.log_r[L], LOG10 + s.log_r_bar)
	m = {'deviation'  : lthr - max(_log(dev), ldev0),
	     'cone'       : float(np.min(lkb - math.log(2) - fwd)),
	     'cone_inv'   : float(np.min(lkb + LOG100 - bwd)),
	     'clearance'  : clear - ldev0 if clear == clear else -np.inf}
	report = ReturnReport(dev, ldev0, lthr, m)
	for name in ('deviation', 'cone', 'cone_inv', 'clearance'):
		if not m[name] > 0 and not (name == 'deviation' and m[name] == 0):
			raise ReturnMapTooFar("return map check '%s' fails : deviation "
			                      "%.6g, margin %.6g" % (name, dev, m[name]),
			                      check=name, deviation=dev,
			                      log_deviation_c0=ldev0, margin=m[name])
	return report


#===============================================================================
# strips :

class StripPair(object):
	"""
	The vertical strip ``R1`` of ``U_0`` and its image ``R2 = G(R1)``, a
	horizontal strip of ``U_0``, with the four graph crossings.
	"""
	def __init__(self, r1, r2, crossings, margins):
		self.r1        = r1
		self.r2        = r2
		self.crossings = crossings
		self.margins   = margins

	def centroid(self):
		return np.mean(self.crossings, axis=0)

	def to_dict(self):
		"""
		:rtype: dict
		"""
		return {'R1' : self.r1.to_dict(), 'R2' : self.r2.to_dict(),
		        'crossings' : self.crossings, 'margins' : self.margins}


def _bisect(f, lo, hi, iterations=80):
	flo = f(lo)
	fhi = f(hi)
	if flo == 0:
		return lo
	if fhi == 0:
		return hi
	if (flo < 0) == (fhi < 0):
		return None
	for i in range(iterations):
		mid  = 0.5*(lo + hi)
		fmid = f(mid)
		if fmid == 0 or mid == lo or mid == hi:
			return mid
		if (fmid < 0) == (flo < 0):
			lo, flo = mid, fmid
		else:
			hi = mid
	return 0.5*(lo + hi)


def _slopes(poly, along):
	# largest |d(other)/d(along)| over the polyline segments :
	d = np.diff(poly, axis=0)
	a = np.abs(d[:,along])
	o = np.abs(d[:,1 - along])
	with np.errstate(divide='ignore', invalid='ignore'):
		s = np.where(a > 0, o / np.where(a > 0, a, 1.0),
		             np.where(o > 0, np.inf, 0.0))
	return float(np.max(s)) if len(s) else 0.0


def unique_crossing(vertical, horizontal):
	"""
	The single crossing of a vertical graph (sampled by ``w``) and a
	horizontal graph (sampled by ``v``), located by bisection on the
	horizontal polyline.

	:raises StripConstructionFailed: unless exactly one sign change occurs
	:rtype: :class:`~numpy.ndarray`
	"""
	order = np.argsort(vertical[:,1])
	wv    = vertical[order,1]
	vv    = vertical[order,0]
	phi   = lambda w : np.interp(w, wv, vv)
	d     = horizontal[:,0] - phi(horizontal[:,1])
	sgn   = np.sign(d)
	nz    = sgn[sgn != 0]
	count = int(np.sum(nz[1:] != nz[:-1]))
	if count != 1:
		raise StripConstructionFailed("graphs cross %i times, not once" % count,
		                              stage='intersection', crossings=count)
	i  = int(np.nonzero(sgn != sgn[0])[0][0]) if sgn[0] != 0 else 0
	if sgn[0] == 0:
		return horizontal[0]
	p0 = horizontal[i-1]
	p1 = horizontal[i]
	f  = lambda s : (p0 + s*(p1 - p0))[0] - phi((p0 + s*(p1 - p0))[1])
	s  = _bisect(f, 0.0, 1.0)
	return p0 + s*(p1 - p0)


def concatenate_strips(map, trace, schedule, points=17, budget=65536,
                       ret=None):
	"""
	Construct the vertical strip ``R1 = {p in U_0 : |pi_1 G(p)| <= r_bar}``
	and its image ``R2 = G(R1)``.

	The two vertical graphs of ``R1`` are pullbacks of ``pi_1 = -r_bar`` and
	``pi_1 = r_bar`` : along each level ``w = t h(v)`` between the
	horizontal boundaries of ``U_0`` the abscissa is found by bisection, and
	the sampling in ``t`` is refined until linear interpolation agrees to
	``1e-6 r_bar`` or the segment budget is spent.  The horizontal graphs of
	``R2`` are the images of the horizontal boundary pieces of ``R1``.
	Checks : the graphs of ``R1`` are ``kappa_bar``-vertical, those of
	``R2`` ``kappa_bar/50``-horizontal and strictly inside ``U_0``, every
	vertical and horizontal graph pair crosses exactly once, and ``DG'``
	maps ``C(kappa_bar)`` into ``C(kappa_bar/100)`` on ``R1``.

	:raises StripConstructionFailed: with the stage and the reason
	:rtype: :class:`~certifier.StripPair`
	"""
	if not schedule.geometry:
		raise StripConstructionFailed("r_bar = exp(%.6g) is below the geometry "
		                              "floor" % schedule.log_r_bar,
		                              stage='geometry')
	ret = ReturnMap(map, trace) if ret is None else ret
	U0  = schedule.box(0)
	r   = U0.r
	kb  = math.exp(schedule.log_kappa_bar)

	def level(t, target):
		f = lambda v : ret.G(np.array([v, t*U0.half_height(v)]))[0] - target
		v = _bisect(f, -r, r)
		if v is None:
			raise StripConstructionFailed("the image of the vertical boundary "
			                              "of U_0 does not clear %+.3e at t = "
			                              "%.3f" % (target, t), stage='pullback')
		return v

	graphs = []
	for target in (-r, r):
		t = list(np.linspace(-1, 1, int(points)))
		v = [level(x, target) for x in t]
		refine = True
		while refine:
			refine = False
			nt, nv = [t[0]], [v[0]]
			for (t0, v0), (t1, v1) in pairwise(zip(t, v)):
				if len(t) + len(nt) > budget:
					raise StripConstructionFailed("polyline refinement exceeded "
					                              "%i segments" % budget,
					                              stage='refinement')
				tm = 0.5*(t0 + t1)
				vm = level(tm, target)
				if abs(vm - 0.5*(v0 + v1)) > 1e-6*r:
					nt.append(tm)
					nv.append(vm)
					refine = True
				nt.append(t1)
				nv.append(v1)
			t, v = nt, nv
		v = np.array(v)
		graphs.append(np.stack([v, np.array(t)*U0.half_height(v)], axis=-1))
	graphs.sort(key=lambda g : float(np.mean(g[:,0])))

	lip_v = [_slopes(g, 1) for g in graphs]
	if max(lip_v) >= kb:
		raise StripConstructionFailed("vertical graphs of R1 have slope %.3e, "
		                              "not below kappa_bar = %.3e"
		                              % (max(lip_v), kb), stage='vertical')
	r1 = Strip(U0, 'vertical', graphs, lip_v)

	images = []
	for piece in (r1._piece(graphs[0][0,0],  graphs[1][0,0],  -1, int(points)),
	              r1._piece(graphs[0][-1,0], graphs[1][-1,0],  1, int(points))):
		img = ret.G(piece)
		dv  = np.diff(img[:,0])
		if not (np.all(dv > 0) or np.all(dv < 0)):
			raise StripConstructionFailed("image of a horizontal boundary piece "
			                              "is not a graph over v",
			                              stage='horizontal')
		images.append(img[np.argsort(img[:,0])])
	images.sort(key=lambda g : float(np.mean(g[:,1])))
	lip_h = [_slopes(g, 0) for g in images]
	if max(lip_h) >= kb/50:
		raise StripConstructionFailed("horizontal graphs of R2 have slope "
		                              "%.3e, not below kappa_bar/50"
		                              % max(lip_h), stage='horizontal')
	inside = [float(np.min(U0.half_height(g[:,0]) - np.abs(g[:,1])))
	          for g in images]
	if min(inside) <= 0:
		raise StripConstructionFailed("R2 touches the horizontal boundary of "
		                              "U_0", stage='horizontal',
		                              margin=min(inside))
	r2 = Strip(U0, 'horizontal', images, lip_h)

	if max(lip_v) * max(lip_h) >= 1:
		raise StripConstructionFailed("Lipschitz product %.3e is not below 1"
		                              % (max(lip_v)*max(lip_h)),
		                              stage='intersection')
	crossings = np.array([unique_crossing(g, h) for g in graphs
	                      for h in images])

	pts  = r1.samples()
	cone = _cone_slopes(ret.DG_prime(pts), np.array([[1.0, kb], [1.0, -kb]]))
	m    = {'vertical_slope'   : math.log(kb) - _log(max(lip_v)),
	        'horizontal_slope' : math.log(kb/50) - _log(max(lip_h)),
	        'inside'           : min(inside),
	        'composed_cone'    : float(np.min(math.log(kb/100) - cone))}
	if not m['composed_cone'] > 0:
		raise StripConstructionFailed("DG' does not map C(kappa_bar) into "
		                              "C(kappa_bar/100), margin %.6g"
		                              % m['composed_cone'], stage='cone')
	print_text("::: strips R1, R2 built : %i and %i vertices :::"
	           % (len(graphs[0]) + len(graphs[1]),
	              len(images[0]) + len(images[1])), '208')
	return StripPair(r1, r2, crossings, m)


#===============================================================================
# degree and spectrum :

def winding_number(field, polygon, budget=65536):
	"""
	Degree of the vector field ``field`` along the closed polygon.  Each
	edge is subdivided until consecutive field vectors turn by less than
	``pi/4``, so that no turn is missed between samples.

	:param field: callable mapping points of shape ``(n, 2)`` to vectors
	:param polygon: closed polygon, first point repeated
	:raises DegreeZero: if the field vanishes on the polygon
	:raises BudgetExceeded: when more than ``budget`` subdivisions are needed
	:rtype: int
	"""
	polygon = np.asarray(polygon, dtype=float)
	values  = field(polygon)
	total   = 0.0
	evals   = 0
	for (p, fp), (q, fq) in pairwise(zip(polygon, values)):
		stack = [(p, q, fp, fq)]
		while stack:
			a, b, fa, fb = stack.pop()
			if not (np.any(fa != 0) and np.any(fb != 0)):
				raise DegreeZero("the field vanishes on the curve at %s"
				                 % list(a if not np.any(fa != 0) else b))
			turn = math.atan2(fa[0]*fb[1] - fa[1]*fb[0], fa[0]*fb[0] + fa[1]*fb[1])
			if abs(turn) > 0.25*math.pi:
				evals += 1
				if evals > budget:
					raise BudgetExceeded("winding number needs more than %i "
					                     "subdivisions" % budget)
				m  = 0.5*(a + b)
				fm = field(m[None,:])[0]
				stack.append((m, b, fm, fb))
				stack.append((a, m, fa, fm))
			else:
				total += turn
	degree = int(round(total / (2*math.pi)))
	return degree


class Spectrum(object):
	"""
	Eigenvalues of ``Dg^L`` at a periodic point.  For a real hyperbolic pair
	``log_moduli`` holds ``(log|mu_max|, log|mu_min|)``, the smaller one
	recovered from the determinant.
	"""
	def __init__(self, eigenvalues, log_moduli, real, log_det):
		self.eigenvalues = eigenvalues
		self.log_moduli  = log_moduli
		self.real        = real
		self.log_det     = log_det

	def is_hyperbolic(self):
		return self.real and self.log_moduli[0] > 0 > self.log_moduli[1]

	def product(self):
		"""
		Product of the eigenvalues, ``det Dg^L``.
		"""
		if self.real:
			sgn = np.sign(self.eigenvalues[0]) * np.sign(self.eigenvalues[1])
			return float(sgn * math.exp(sum(self.log_moduli)))
		return math.exp(self.log_det)

	def to_dict(self):
		"""
		:rtype: dict
		"""
		ev = self.eigenvalues
		if not self.real:
			ev = [[float(e.real), float(e.imag)] for e in ev]
		return {'eigenvalues' : ev, 'log_moduli' : self.log_moduli,
		        'real' : self.real, 'log_det' : self.log_det}


def cycle_spectrum(map, z, L):
	"""
	Spectrum of ``Dg^L(z)`` from the renormalized product of the Jacobians
	along the orbit of ``z``.

	:rtype: :class:`~certifier.Spectrum`
	"""
	pts = [np.asarray(z, dtype=float)]
	for i in range(int(L) - 1):
		pts.append(np.asarray(map.step(*pts[-1]), dtype=float))
	P, log_s, log_det = accumulate_product(map.jacobian(np.array(pts)))
	tr   = P[0,0] + P[1,1]
	dP   = det2(P)
	disc = tr*tr - 4*dP
	if disc < 0:
		ev = np.linalg.eigvals(P) * (math.exp(log_s) if log_s < 700 else np.inf)
		lm = 0.5*log_det
		return Spectrum(list(ev), [lm, lm], False, log_det)
	mu   = 0.5*(tr + math.copysign(math.sqrt(disc), tr))
	lmax = log_s + _log(abs(mu))
	lmin = log_det - lmax
	smin = np.sign(dP) * np.sign(mu)
	ev   = [math.copysign(math.exp(lmax), mu) if lmax < 700 else
	        math.copysign(np.inf, mu),
	        float(smin * math.exp(lmin)) if lmin > -745 else 0.0]
	return Spectrum(ev, [lmax, lmin], True, log_det)


class HyperbolicReport(object):
	"""
	Outcome of :func:`verify_hyperbolic_like` or of the fixed-point index
	leg : degree, fixed point, residual, spectrum and cone margins.
	"""
	def __init__(self, degree, fixed_point, residual, iterations, spectrum,
	             margins, start):
		self.degree      = degree
		self.fixed_point = fixed_point
		self.residual    = residual
		self.iterations  = iterations
		self.spectrum    = spectrum
		self.margins     = margins
		self.start       = start

	def to_dict(self):
		"""
		:rtype: dict
		"""
		return {'degree' : self.degree, 'fixed_point' : self.fixed_point,
		        'residual' : self.residual, 'iterations' : self.iterations,
		        'spectrum' : self.spectrum.to_dict(), 'margins' : self.margins,
		        'start' : self.start}


def _solve_and_split(map, start, L, tol, max_iter):
	z, res, it = newton_periodic(map, start, L, tol, max_iter)
	sp         = cycle_spectrum(map, z, L)
	if not sp.is_hyperbolic():
		raise NonHyperbolicSpectrum("Dg^%i at the fixed point is not "
		                            "hyperbolic : log moduli %s"
		                            % (L, sp.log_moduli),
		                            spectrum=sp.to_dict())
	return z, res, it, sp


def verify_hyperbolic_like(map, ret, strips, kappa_pair=None, tol=1e-10,
                           max_iter=100):
	"""
	Check that ``G`` is hyperbolic-like from ``R1`` onto ``R2`` and locate
	its fixed point :

	1. the degree of ``p -> G(p) - p`` along the boundary of ``R1`` is
	   nonzero (``|degree| = 1`` is expected; the sign is recorded),
	2. ``DG`` maps ``C(k')`` into ``C(k'/2)`` on ``R1`` and ``DG^-1`` maps
	   ``C~(k'')`` into ``C~(k''/2)`` on ``R2``, ``(k', k'') = kappa_pair``,
	   ``(kappa_bar, 2 kappa_bar)`` by default,
	3. Newton on ``g^L - id`` from the centroid of the strip crossings
	   converges and the spectrum of ``Dg^L`` there splits.

	:raises DegreeZero, ConeCheckFailed, NewtonDiverged, NonHyperbolicSpectrum:
	:rtype: :class:`~certifier.HyperbolicReport`
	"""
	r1, r2 = strips.r1, strips.r2
	if kappa_pair is None:
		kb         = r1.parent.kappa
		kappa_pair = (kb, 2*kb)
	k1, k2 = kappa_pair

	degree = winding_number(lambda p : ret.G(p) - p, r1.boundary())
	if degree == 0:
		raise DegreeZero("G - id has degree 0 along the boundary of R1")

	pts  = r1.samples()
	DG   = ret.DG(pts)
	fwd  = _cone_slopes(DG, np.array([[1.0, k1], [1.0, -k1]]))
	bwd  = -_cone_slopes(inv2(DG), np.array([[k2, 1.0], [-k2, 1.0]]))
	m    = {'forward_cone'  : float(np.min(math.log(k1/2) - fwd)),
	        'backward_cone' : float(np.min(math.log(k2/2) - bwd))}
	for name in ('forward_cone', 'backward_cone'):
		if not m[name] > 0:
			raise ConeCheckFailed("%s condition of G fails, margin %.6g"
			                      % (name, m[name]), inequality=name,
			                      margin=m[name])

	start = ret.start.embed(strips.centroid())
	z, res, it, sp = _solve_and_split(map, start, ret.L, tol, max_iter)
	m['degree_sign'] = int(np.sign(degree))
	print_text("::: hyperbolic fixed point of g^%i at %s, degree %i, "
	           "log moduli (%.6g, %.6g) :::"
	           % (ret.L, list(z), degree, sp.log_moduli[0], sp.log_moduli[1]),
	           '208')
	return HyperbolicReport(degree, z, res, it, sp, m, start)


def square(half_side, n=9):
	"""
	Closed counter-clockwise polygon of the square ``[-h, h]^2``.
	"""
	s  = np.linspace(-1, 1, n)*half_side
	h  = half_side
	pts = np.concatenate([np.stack([s, np.full(n, -h)], axis=-1),
	                      np.stack([np.full(n, h), s], axis=-1)[1:],
	                      np.stack([s[::-1], np.full(n, h)], axis=-1)[1:],
	                      np.stack([np.full(n, -h), s[::-1]], axis=-1)[1:]])
	return pts


def fixed_point_index(map, z, L, half_side=1e-7):
	"""
	Degree of ``p -> g^L(p) - p`` along a small square centered at ``z``.

	:rtype: int
	"""
	domain = map.domain

	def field(p):
		y = domain.translate(z, p)
		x = y
		for i in range(int(L)):
			y = map.eval(y)
		return domain.difference(y, x)

	return winding_number(field, square(half_side))


def fixed_point_leg(map, x0, L, tol=1e-10, max_iter=100, half_side=1e-7):
	"""
	The check used below the geometry floor : Newton on ``g^L - id`` from
	``x0``, the spectrum at the solution and the degree along a small
	square around it.

	:rtype: :class:`~certifier.HyperbolicReport`
	"""
	z, res, it, sp = _solve_and_split(map, x0, L, tol, max_iter)
	degree         = fixed_point_index(map, z, L, half_side)
	if degree == 0:
		raise DegreeZero("g^%i - id has degree 0 around %s" % (L, list(z)))
	print_text("::: fixed point of g^%i at %s, index %i, log moduli "
	           "(%.6g, %.6g) :::" % (L, list(z), degree, sp.log_moduli[0],
	                                 sp.log_moduli[1]), '208')
	return HyperbolicReport(degree, z, res, it, sp,
	                        {'degree_sign' : int(np.sign(degree)),
	                         'half_side' : half_side}, x0)


#===============================================================================
# certificates :

class HyperbolicityCertificate(object):
	"""
	A hyperbolic periodic point of period dividing ``L``, certified from a
	good point.  ``regime`` is ``'geometric'`` when boxes and strips were
	built and ``'schedule-only'`` when ``r_bar`` lies below the geometry
	floor.
	"""
	SCHEMA  = 'clslvr-certificate/1'
	NUMERIC = 'floating-point sampling and analytic sufficient inequalities, ' \
	          'no directed rounding'

	def __init__(self, map, good_point, schedule, steps, return_report,
	             strips, hyperbolic, params):
		self.map           = map
		self.good_point    = good_point
		self.schedule      = schedule
		self.steps         = steps
		self.return_report = return_report
		self.strips        = strips
		self.hyperbolic    = hyperbolic
		self.params        = params
		self.period        = schedule.L
		self.degree        = hyperbolic.degree
		self.fixed_point   = hyperbolic.fixed_point
		self.residual      = hyperbolic.residual
		self.spectrum      = hyperbolic.spectrum
		self.regime        = 'geometric' if strips is not None \
		                     else 'schedule-only'

	def color(self):
		"""
		return the default color for this class.
		"""
		return '208'

	@property
	def eigenvalues(self):
		return self.spectrum.eigenvalues

	def cone_margins(self):
		"""
		Worst margin of every verified inequality.
		"""
		m = dict(('schedule_' + k, v)
		         for k, v in self.schedule.min_margins().items())
		keys = set()
		for st in self.steps:
			keys.update(st.margins)
		for k in sorted(keys):
			m['step_' + k] = float(min(st.margins[k] for st in self.steps))
		for k, v in self.return_report.margins.items():
			m['return_' + k] = v
		if self.strips is not None:
			for k, v in self.strips.margins.items():
				m['strip_' + k] = v
		for k, v in self.hyperbolic.margins.items():
			m['hyperbolic_' + k] = v
		return m

	def diagnostic_rows(self):
		"""
		One row per step with the schedule and the step margins.
		"""
		s    = self.schedule
		tr   = self.good_point.trace
		rows = []
		for st in self.steps:
			n   = st.n
			row = {'n'           : n,
			       'lambda_s'    : tr.lambda_s[n],
			       'lambda_u'    : tr.lambda_u[n],
			       'lambda_e'    : tr.lambda_e[n],
			       'log_c'       : s.log_c[n],
			       'log_r'       : s.log_r[n],
			       'log_tau'     : s.log_tau[n],
			       'log_kappa'   : s.log_kappa[n],
			       'log_eps'     : s.log_eps[n],
			       'beta'        : s.margins['beta'][n],
			       'r_tau'       : s.margins['r_tau'][n],
			       'epsilon'     : s.margins['epsilon'][n]}
			row.update(st.margins)
			rows.append(row)
		return rows

	def to_dict(self):
		"""
		:rtype: dict
		"""
		return {'schema'        : self.SCHEMA,
		        'numeric_regime': self.NUMERIC,
		        'regime'        : self.regime,
		        'map'           : self.map.to_dict(),
		        'good_point'    : self.good_point.to_dict(),
		        'schedule'      : self.schedule.to_dict(),
		        'return_map'    : self.return_report.to_dict(),
		        'strips'        : self.strips.to_dict()
		                          if self.strips is not None else None,
		        'period'        : self.period,
		        'degree'        : self.degree,
		        'fixed_point'   : self.fixed_point,
		        'residual'      : self.residual,
		        'eigenvalues'   : self.spectrum.to_dict(),
		        'cone_margins'  : self.cone_margins(),
		        'parameters'    : self.params}


def certify(map, good_point, params=None, threads=None):
	"""
	Certify a hyperbolic periodic point from a good point : schedule,
	per-step cone checks (parallel over steps), strips, return map and the
	hyperbolic-like verification, or the fixed-point index leg below the
	geometry floor.

	:param map: the map
	:param good_point: a verified good point
	:param params: overrides of :func:`default_certify_params`
	:raises StageError: wrapping the first failing stage, its diagnostics
	                    attached
	:rtype: :class:`~certifier.HyperbolicityCertificate`
	"""
	params = merge_params(default_certify_params(), params,
	                      'certification parameters')
	print_params('certification', params, color='208')
	tr     = good_point.trace
	L      = tr.length

	def stage(name, func, *args):
		print_text("::: stage %s :::" % name, '208')
		try:
			return func(*args)
		except ClslvrError as e:
			raise StageError(name, e)

	def goodpoint():
		report = verify_goodpoint(good_point)
		if not report['ok']:
			raise InvalidParameter("good point does not re-verify",
			                       report=report)
		return report

	stage('goodpoint', goodpoint)
	schedule = stage('schedule', schedule_for, map, good_point, params)
	ret      = ReturnMap(map, tr)

	def cones():
		frames = [frame_map(tr, n, map.domain, schedule.log_beta_bar)
		          for n in range(L + 1)]
		return parallel_map(lambda n : cone_step_check(map, tr, schedule, n,
		                                               params['cone_mode'],
		                                               params['cone_samples'],
		                                               frames),
		                    range(L), threads)

	steps = stage('cones', cones)
	print_min_max([st.margins['kappa'] for st in steps],
	              '::: kappa margins', cls=schedule)

	strips = None
	if schedule.geometry:
		strips = stage('strips', concatenate_strips, map, tr, schedule,
		               params['strip_points'], params['strip_budget'], ret)
	ret_report = stage('return', return_map_check, map, tr, schedule,
	                   params['return_tol'], ret)
	if strips is not None:
		hyp = stage('hyperbolic', verify_hyperbolic_like, map, ret, strips,
		            None, params['newton_tol'], params['newton_max_iter'])
	else:
		hyp = stage('hyperbolic', fixed_point_leg, map, tr.points[0], L,
		            params['newton_tol'], params['newton_max_iter'],
		            params['degree_half_side'])
	cert = HyperbolicityCertificate(map, good_point, schedule, steps,
	                                ret_report, strips, hyp, params)
	print_text("::: certificate (%s) : period %i, degree %i, residual %.3e :::"
	           % (cert.regime, cert.period, cert.degree, cert.residual),
	           cls=cert)
	return cert


def verify_certificate(map, cert):
	"""
	Re-run the verification legs of a certificate from its stored data :
	the good point conditions, the schedule checks, the analytic cone
	checks, the return map, the residual and spectrum at the stored fixed
	point, and the degree (along the stored strip boundary, or around the
	fixed point).  Degree, residual and log moduli must reproduce the
	stored values within ``1e-8``.

	:param map: the map, ``None`` to rebuild it from the certificate
	:param cert: a certificate or its :meth:`to_dict` output
	:rtype: dict
	"""
	d  = cert.to_dict() if hasattr(cert, 'to_dict') else cert
	if d.get('schema') != HyperbolicityCertificate.SCHEMA:
		raise InvalidParameter("not a hyperbolicity certificate : schema %s"
		                       % d.get('schema'))
	gp  = GoodPointCertificate.from_dict(d['good_point'])
	map = gp.map if map is None else map
	sd  = d['schedule']
	rep = {'goodpoint' : verify_goodpoint(gp)['ok']}

	s = BoxSchedule(gp.trace, gp.a, sd['D'], sd['M'], sd['C0'],
	                sd['geometry_floor'])
	rep['schedule'] = len(s.failures) == 0
	try:
		for n in range(s.L):
			cone_step_check(map, gp.trace, s, n, 'analytic')
		rep['cones'] = True
	except ConeCheckFailed:
		rep['cones'] = False
	try:
		return_map_check(map, gp.trace, s, d['parameters'].get('return_tol'))
		rep['return_map'] = True
	except ReturnMapTooFar:
		rep['return_map'] = False

	L  = d['period']
	z  = np.asarray(d['fixed_point'], dtype=float)
	y  = z
	for i in range(L):
		y = map.eval(y)
	res = float(np.linalg.norm(map.domain.difference(y, z)))
	rep['residual'] = res
	rep['residual_ok'] = abs(res - d['residual']) <= 1e-8 and \
	                     res < d['parameters'].get('newton_tol', 1e-10)*10

	sp = cycle_spectrum(map, z, L)
	lm = d['eigenvalues']['log_moduli']
	rep['spectrum'] = sp.is_hyperbolic() and \
	                  all(abs(x - y) <= 1e-8*max(1.0, abs(y))
	                      for x, y in zip(sp.log_moduli, lm))

	if d['strips'] is not None:
		ret = ReturnMap(map, gp.trace)
		r1  = Strip.from_dict(d['strips']['R1'])
		deg = winding_number(lambda p : ret.G(p) - p, r1.boundary())
	else:
		h   = d['parameters'].get('degree_half_side', 1e-7)
		deg = fixed_point_index(map, z, L, h)
	rep['degree']    = deg
	rep['degree_ok'] = deg == d['degree']
	rep['ok'] = all(rep[k] for k in ('goodpoint', 'schedule', 'cones',
	                                 'return_map', 'residual_ok', 'spectrum',
	                                 'degree_ok'))
	return rep


CERTIFY_MATCH_RADIUS = 1e-13


def search_and_certify(map, q, a, goodpoint_params=None, params=None,
                       threads=None):
	"""
	Good-point search followed by :func:`certify`.  Unless overridden, the
	search refines its seeds to hyperbolic cycles and uses
	``min_return = 'auto'`` with a match radius of ``1e-13`` : the return
	map tolerance ``0.01 kappa_bar`` is far below the default radius, and
	the tiled periodic orbits match to rounding.  The certificate's good
	point records ``refined``.

	:raises StageError: tagged ``'goodpoint'`` with the search statistics
	                    when no good point is found, or by :func:`certify`
	:rtype: :class:`~certifier.HyperbolicityCertificate`
	"""
	gp_params = {'min_return' : 'auto', 'match_radius' : CERTIFY_MATCH_RADIUS,
	             'refine' : True}
	gp_params.update(goodpoint_params or {})
	gp = goodpoint_search(map, q, a, gp_params, threads)
	if isinstance(gp, NotFound):
		raise StageError('goodpoint', InvalidParameter(gp.reason,
		                                               statistics=gp.statistics))
	return certify(map, gp, params, threads)
