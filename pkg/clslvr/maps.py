"""
Catalog of area-preserving planar maps.

Every map lives on one flat chart of its domain and provides point
evaluation, a closed-form Jacobian, bounds ``d1_bound >= ||Dg||`` and
``d2_bound >= ||D^2 g||``, and, where it makes sense, the lifted angular
displacement of one step in turns.  Orbits are iterated with a scalar step for
speed and their Jacobians evaluated afterwards in one vectorized call.
"""
from clslvr.helper      import DomainEscape, UnknownMap, InvalidParameter, \
                               NewtonDiverged, accumulate_product, \
                               singular_values2, det2, inv2, wrap_angle, \
                               parallel_map, chunks
from clslvr.inputoutput import print_text, print_min_max
from scipy.stats        import qmc
from scipy.optimize     import root
import scipy.linalg         as linalg
import numpy                as np
import math

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


#===============================================================================
# domains :

class Domain(object):
	"""
	A chart domain.  Points are arrays of shape ``(..., 2)``.
	"""
	kind = None

	def contains(self, x):
		"""
		Boolean mask of the points ``x`` lying in the domain.
		"""
		raise NotImplementedError

	def wrap(self, x):
		"""
		Reduce periodic coordinates of ``x`` to their fundamental interval.
		"""
		return np.asarray(x, dtype=float)

	def periodic_axes(self):
		"""
		Per chart coordinate, ``(origin, period)`` of a periodic axis or
		``None``.
		"""
		return (None, None)

	def difference(self, y, x):
		"""
		The chart displacement ``y - x``, with periodic coordinates reduced
		to the shortest representative.
		"""
		return np.asarray(y, dtype=float) - np.asarray(x, dtype=float)

	def translate(self, x, v):
		"""
		The point ``x + v``, wrapped.
		"""
		return self.wrap(np.asarray(x, dtype=float) + np.asarray(v, dtype=float))

	def distance(self, y, x):
		"""
		Chart distance between ``y`` and ``x``.
		"""
		return np.linalg.norm(self.difference(y, x), axis=-1)

	def _unit_square(self, u):
		raise NotImplementedError

	def grid(self, n):
		"""
		A deterministic ``n`` by ``n`` sampling grid of the domain.

		:rtype: :class:`~numpy.ndarray` of shape ``(N, 2)``
		"""
		raise NotImplementedError

	def halton(self, count, shrink=1.0):
		"""
		The first ``count`` points of the unscrambled two-dimensional Halton
		sequence mapped into the domain, skipping the initial corner point.
		With ``shrink < 1`` the points are drawn from the domain scaled about
		its center.

		:rtype: :class:`~numpy.ndarray` of shape ``(count, 2)``
		"""
		sampler = qmc.Halton(d=2, scramble=False)
		sampler.fast_forward(1)
		u = sampler.random(int(count))
		u = 0.5 + shrink*(u - 0.5)
		return self._unit_square(u)

	def area(self):
		"""
		Chart area of the domain.
		"""
		raise NotImplementedError

	def to_dict(self):
		"""
		:rtype: dict
		"""
		raise NotImplementedError


class Disk(Domain):
	"""
	The closed disk of radius ``radius`` about the origin, Cartesian chart.
	"""
	kind = 'disk'

	def __init__(self, radius=1.0):
		radius = float(radius)
		if not radius > 0:
			raise InvalidParameter("disk radius must be positive, not %g" % radius)
		self.radius          = radius
		self.validity_radius = radius

	def contains(self, x):
		x = np.asarray(x, dtype=float)
		return np.sum(x**2, axis=-1) <= self.radius**2 * (1 + 1e-12)

	def _unit_square(self, u):
		r = self.radius * np.sqrt(u[:,0])
		t = 2*np.pi * u[:,1]
		return np.stack([r*np.cos(t), r*np.sin(t)], axis=-1)

	def grid(self, n):
		n = int(n)
		r = self.radius * np.arange(1, n+1) / n
		t = 2*np.pi * np.arange(n) / n
		R, T = np.meshgrid(r, t, indexing='ij')
		pts  = np.stack([(R*np.cos(T)).ravel(), (R*np.sin(T)).ravel()], axis=-1)
		return np.vstack([np.zeros((1,2)), pts])

	def area(self):
		return np.pi * self.radius**2

	def to_dict(self):
		return {'kind' : self.kind, 'radius' : self.radius}


class Annulus(Domain):
	"""
	The annulus ``{(theta, p) : inner <= p <= outer}`` with ``theta`` periodic
	of period ``2 pi``.  With ``periodic = True`` the coordinate ``p`` is
	periodic too, which makes the chart a torus.
	"""
	kind = 'annulus'

	def __init__(self, inner, outer, periodic=False):
		inner, outer = float(inner), float(outer)
		if not inner < outer:
			raise InvalidParameter("annulus radii must increase, got inner %g "
			                       ">= outer %g" % (inner, outer))
		self.inner           = inner
		self.outer           = outer
		self.periodic        = bool(periodic)
		self.period          = outer - inner
		self.validity_radius = min(np.pi, 0.5*self.period)

	def contains(self, x):
		x = np.asarray(x, dtype=float)
		if self.periodic:
			return np.isfinite(x[...,1])
		tol = 1e-12 * max(1.0, abs(self.inner), abs(self.outer))
		return (x[...,1] >= self.inner - tol) & (x[...,1] <= self.outer + tol)

	def wrap(self, x):
		x = np.array(x, dtype=float)
		x[...,0] = np.mod(x[...,0], 2*np.pi)
		if self.periodic:
			x[...,1] = self.inner + np.mod(x[...,1] - self.inner, self.period)
		return x

	def periodic_axes(self):
		p = (self.inner, self.period) if self.periodic else None
		return ((0.0, 2*np.pi), p)

	def difference(self, y, x):
		d = np.asarray(y, dtype=float) - np.asarray(x, dtype=float)
		d = np.array(d)
		d[...,0] = wrap_angle(d[...,0])
		if self.periodic:
			h        = 0.5*self.period
			d[...,1] = np.mod(d[...,1] + h, self.period) - h
		return d

	def _unit_square(self, u):
		return np.stack([2*np.pi*u[:,0],
		                 self.inner + self.period*u[:,1]], axis=-1)

	def grid(self, n):
		n = int(n)
		t = 2*np.pi * np.arange(n) / n
		p = np.linspace(self.inner, self.outer, n, endpoint=not self.periodic)
		T, P = np.meshgrid(t, p, indexing='ij')
		return np.stack([T.ravel(), P.ravel()], axis=-1)

	def area(self):
		return 2*np.pi * self.period

	def to_dict(self):
		return {'kind' : self.kind, 'inner' : self.inner, 'outer' : self.outer,
		        'periodic' : self.periodic}


class PlaneChart(Domain):
	"""
	The box ``[xmin, xmax] x [ymin, ymax]``.
	"""
	kind = 'plane-chart'

	def __init__(self, xmin, xmax, ymin, ymax):
		self.box = tuple(float(v) for v in (xmin, xmax, ymin, ymax))
		if not (self.box[0] < self.box[1] and self.box[2] < self.box[3]):
			raise InvalidParameter("plane chart box is empty : %s" % (self.box,))
		self.validity_radius = 0.5*min(self.box[1] - self.box[0],
		                               self.box[3] - self.box[2])

	def contains(self, x):
		x = np.asarray(x, dtype=float)
		x0, x1, y0, y1 = self.box
		return (x[...,0] >= x0) & (x[...,0] <= x1) & \
		       (x[...,1] >= y0) & (x[...,1] <= y1)

	def _unit_square(self, u):
		x0, x1, y0, y1 = self.box
		return np.stack([x0 + (x1 - x0)*u[:,0], y0 + (y1 - y0)*u[:,1]], axis=-1)

	def grid(self, n):
		x0, x1, y0, y1 = self.box
		X, Y = np.meshgrid(np.linspace(x0, x1, int(n)),
		                   np.linspace(y0, y1, int(n)), indexing='ij')
		return np.stack([X.ravel(), Y.ravel()], axis=-1)

	def area(self):
		x0, x1, y0, y1 = self.box
		return (x1 - x0)*(y1 - y0)

	def to_dict(self):
		return {'kind' : self.kind, 'box' : list(self.box)}


#===============================================================================
# maps :

class PlanarMap(object):
	"""
	An area-preserving map of a planar chart domain.

	:param label: identifier of the map
	:param domain: the chart domain
	:param parameters: named real parameters
	:param det_tol: tolerance on ``|det Dg - 1|``
	:type domain: :class:`Domain`
	:type parameters: dict
	"""
	def __init__(self, label, domain, parameters, det_tol=1e-10):
		self.label      = label
		self.domain     = domain
		self.parameters = parameters
		self.det_tol    = float(det_tol)
		self.d1_bound   = None
		self.d2_bound   = None
		self.d2_mode    = 'analytic'

	def color(self):
		"""
		return the default color for this class.
		"""
		return '150'

	def eval(self, x):
		"""
		The image of the points ``x`` of shape ``(..., 2)``.
		"""
		raise NotImplementedError

	def __call__(self, x):
		return self.eval(x)

	def step(self, a, b):
		"""
		Scalar form of :meth:`eval` for one point ``(a, b)``.
		"""
		y = self.eval(np.array([a, b]))
		return float(y[0]), float(y[1])

	def jacobian(self, x):
		"""
		The Jacobian matrices ``Dg(x)`` of shape ``(..., 2, 2)``.
		"""
		raise NotImplementedError

	def has_turns(self):
		"""
		``True`` if the map defines a lifted angular displacement.
		"""
		return False

	def turns(self, x):
		"""
		Lifted angular displacement, in turns, of one step from ``x``.
		"""
		raise InvalidParameter("map '%s' has no angular coordinate" % self.label)

	def verify(self, samples=10000, rng_seed=0):
		"""
		Sample the domain and check ``|det Dg - 1| <= det_tol`` and
		``||Dg|| <= d1_bound``.

		:rtype: dict
		"""
		rng    = np.random.default_rng(rng_seed)
		x      = self.domain._unit_square(rng.random((int(samples), 2)))
		J      = self.jacobian(x)
		det    = det2(J)
		norms  = singular_values2(J)[0]
		report = {'samples'   : int(samples),
		          'det_error' : float(np.max(np.abs(det - 1))),
		          'd1_sample' : float(np.max(norms)),
		          'd1_bound'  : self.d1_bound}
		report['ok'] = report['det_error'] <= self.det_tol and \
		               report['d1_sample'] <= self.d1_bound * (1 + 1e-12)
		return report

	def to_dict(self):
		"""
		:rtype: dict
		"""
		return {'name'       : self.label,
		        'parameters' : dict(self.parameters),
		        'domain'     : self.domain.to_dict(),
		        'det_tol'    : self.det_tol,
		        'd1_bound'   : self.d1_bound,
		        'd2_bound'   : self.d2_bound,
		        'd2_mode'    : self.d2_mode}


def _rotation(angle):
	c, s = math.cos(angle), math.sin(angle)
	return np.array([[c, -s], [s, c]])


class RigidRotation(PlanarMap):
	"""
	Rotation of the disk by ``2 pi eps``.
	"""
	def __init__(self, eps=0.1, radius=1.0, det_tol=1e-10):
		eps = float(eps)
		PlanarMap.__init__(self, 'rigid-rotation', Disk(radius),
		                   {'eps' : eps, 'radius' : float(radius)}, det_tol)
		self.eps      = eps
		self.R        = _rotation(2*np.pi*eps)
		self.d1_bound = 1.0
		self.d2_bound = 0.0

	def eval(self, x):
		return np.einsum('ij,...j->...i', self.R, np.asarray(x, dtype=float))

	def step(self, a, b):
		R = self.R
		return R[0,0]*a + R[0,1]*b, R[1,0]*a + R[1,1]*b

	def jacobian(self, x):
		x = np.asarray(x, dtype=float)
		return np.broadcast_to(self.R, x.shape[:-1] + (2,2)).copy()

	def has_turns(self):
		return True

	def turns(self, x):
		x = np.asarray(x, dtype=float)
		return np.full(x.shape[:-1], self.eps)


class PolarTwist(PlanarMap):
	"""
	The integrable twist ``z -> z exp(2 pi i (rho0 + rho1 |z|^2))`` of the disk.
	"""
	def __init__(self, rho0=0.1, rho1=0.2, radius=1.0, det_tol=1e-10):
		PlanarMap.__init__(self, 'polar-twist', Disk(radius),
		                   {'rho0' : float(rho0), 'rho1' : float(rho1),
		                    'radius' : float(radius)}, det_tol)
		self.rho0     = float(rho0)
		self.rho1     = float(rho1)
		R             = float(radius)
		t             = 4*np.pi*abs(self.rho1)*R**2
		c             = 4*np.pi*abs(self.rho1)
		self.d1_bound = 0.5*(t + math.sqrt(t**2 + 4))
		self.d2_bound = 3*c*R + c**2*R**3

	def _angle(self, x):
		return 2*np.pi*(self.rho0 + self.rho1*np.sum(x**2, axis=-1))

	def eval(self, x):
		x    = np.asarray(x, dtype=float)
		phi  = self._angle(x)
		c, s = np.cos(phi), np.sin(phi)
		return np.stack([c*x[...,0] - s*x[...,1], s*x[...,0] + c*x[...,1]],
		                axis=-1)

	def step(self, a, b):
		phi  = 2*math.pi*(self.rho0 + self.rho1*(a*a + b*b))
		c, s = math.cos(phi), math.sin(phi)
		return c*a - s*b, s*a + c*b

	def jacobian(self, x):
		x    = np.asarray(x, dtype=float)
		phi  = self._angle(x)
		c, s = np.cos(phi), np.sin(phi)
		f1   = c*x[...,0] - s*x[...,1]
		f2   = s*x[...,0] + c*x[...,1]
		gx   = 4*np.pi*self.rho1*x[...,0]
		gy   = 4*np.pi*self.rho1*x[...,1]
		J    = np.empty(x.shape[:-1] + (2,2))
		J[...,0,0] = c - f2*gx
		J[...,0,1] = -s - f2*gy
		J[...,1,0] = s + f1*gx
		J[...,1,1] = c + f1*gy
		return J

	def has_turns(self):
		return True

	def turns(self, x):
		x = np.asarray(x, dtype=float)
		return self.rho0 + self.rho1*np.sum(x**2, axis=-1)


class StandardMap(PlanarMap):
	"""
	The Chirikov standard map ``p' = p + k sin(theta)``,
	``theta' = theta + p'`` on the torus chart ``[0, 2 pi) x [-pi, pi)``.
	"""
	def __init__(self, k=1.2, det_tol=1e-10):
		k = float(k)
		PlanarMap.__init__(self, 'standard-map',
		                   Annulus(-np.pi, np.pi, periodic=True),
		                   {'k' : k}, det_tol)
		self.k        = k
		F             = 2*k**2 + 2*abs(k) + 3
		self.d1_bound = math.sqrt(0.5*(F + math.sqrt(F**2 - 4)))
		self.d2_bound = math.sqrt(2)*abs(k)

	def eval(self, x):
		x  = np.asarray(x, dtype=float)
		p  = x[...,1] + self.k*np.sin(x[...,0])
		t  = x[...,0] + p
		return self.domain.wrap(np.stack([t, p], axis=-1))

	def step(self, a, b):
		p = b + self.k*math.sin(a)
		p = -math.pi + (p + math.pi) % (2*math.pi)
		t = (a + p) % (2*math.pi)
		return t, p

	def jacobian(self, x):
		x  = np.asarray(x, dtype=float)
		kc = self.k*np.cos(x[...,0])
		J  = np.empty(x.shape[:-1] + (2,2))
		J[...,0,0] = 1 + kc
		J[...,0,1] = 1.0
		J[...,1,0] = kc
		J[...,1,1] = 1.0
		return J

	def has_turns(self):
		return True

	def turns(self, x):
		x = np.asarray(x, dtype=float)
		p = x[...,1] + self.k*np.sin(x[...,0])
		p = -np.pi + np.mod(p + np.pi, 2*np.pi)
		return p / (2*np.pi)


class LinearSaddle(PlanarMap):
	"""
	The hyperbolic linear map ``diag(mu, 1/mu)`` on the square of half-side
	``extent``.
	"""
	def __init__(self, mu=2.0, extent=1e6, det_tol=1e-10):
		mu = float(mu)
		if mu == 0:
			raise InvalidParameter("linear-saddle needs mu != 0")
		e = float(extent)
		PlanarMap.__init__(self, 'linear-saddle', PlaneChart(-e, e, -e, e),
		                   {'mu' : mu, 'extent' : e}, det_tol)
		self.mu       = mu
		self.A        = np.diag([mu, 1.0/mu])
		self.d1_bound = max(abs(mu), 1.0/abs(mu))
		self.d2_bound = 0.0

	def eval(self, x):
		x = np.asarray(x, dtype=float)
		return np.stack([self.mu*x[...,0], x[...,1]/self.mu], axis=-1)

	def step(self, a, b):
		return self.mu*a, b/self.mu

	def jacobian(self, x):
		x = np.asarray(x, dtype=float)
		return np.broadcast_to(self.A, x.shape[:-1] + (2,2)).copy()


class PerturbedTwist(PlanarMap):
	"""
	The kicked twist ``p' = p + amplitude V(theta)``,
	``theta' = theta + 2 pi (eps + twist p')`` on the annulus
	``inner <= p <= outer``, with
	``V(theta) = sum_k a_k cos(k theta) + b_k sin(k theta)`` given by the
	coefficient table ``[[k, a_k, b_k], ...]``.  With ``twist = 0`` every
	orbit turns by ``eps`` per step.
	"""
	DEFAULT_COEFFICIENTS = [[1, 0.0, 1.0]]

	def __init__(self, eps=GOLDEN, amplitude=0.05, twist=0.0, inner=-1.0,
	             outer=1.0, coefficients=None, det_tol=1e-10):
		user  = coefficients is not None
		table = self.DEFAULT_COEFFICIENTS if coefficients is None \
		        else coefficients
		try:
			table = [[int(r[0]), float(r[1]), float(r[2])] for r in table]
		except (TypeError, ValueError, IndexError):
			raise InvalidParameter("coefficient table rows must read "
			                       "[k, a_k, b_k]", coefficients=coefficients)
		if len(table) == 0 or any(r[0] < 1 for r in table):
			raise InvalidParameter("coefficient table needs rows with k >= 1")

		params = {'eps' : float(eps), 'amplitude' : float(amplitude),
		          'twist' : float(twist), 'inner' : float(inner),
		          'outer' : float(outer)}
		if user:
			params['coefficients'] = table
		PlanarMap.__init__(self, 'perturbed-twist', Annulus(inner, outer),
		                   params, det_tol)
		self.eps       = float(eps)
		self.amplitude = float(amplitude)
		self.twist     = float(twist)
		self.k         = np.array([r[0] for r in table], dtype=float)
		self.a         = np.array([r[1] for r in table])
		self.b         = np.array([r[2] for r in table])

		c  = 2*np.pi*self.twist
		W  = abs(self.amplitude) * np.sum(self.k*(np.abs(self.a) + np.abs(self.b)))
		self.d1_bound = max(self._norm_at(W), self._norm_at(-W))
		if user:
			t   = np.linspace(0, 2*np.pi, 65537)
			V2  = np.max(np.abs(self._V(t, 2)))
			self.d2_mode  = 'sampled'
			self.d2_bound = 1.5 * math.sqrt(c**2 + 1) * abs(self.amplitude) * V2
		else:
			V2  = np.sum(self.k**2*(np.abs(self.a) + np.abs(self.b)))
			self.d2_bound = math.sqrt(c**2 + 1) * abs(self.amplitude) * V2

	def _norm_at(self, w):
		c = 2*np.pi*self.twist
		J = np.array([[1 + c*w, c], [w, 1.0]])
		return float(singular_values2(J)[0])

	def _V(self, theta, order=0):
		kt = np.multiply.outer(np.asarray(theta, dtype=float), self.k)
		if order == 0:
			v = self.a*np.cos(kt) + self.b*np.sin(kt)
		elif order == 1:
			v = self.k*(-self.a*np.sin(kt) + self.b*np.cos(kt))
		else:
			v = -self.k**2*(self.a*np.cos(kt) + self.b*np.sin(kt))
		return np.sum(v, axis=-1)

	def eval(self, x):
		x = np.asarray(x, dtype=float)
		p = x[...,1] + self.amplitude*self._V(x[...,0])
		t = x[...,0] + 2*np.pi*(self.eps + self.twist*p)
		return self.domain.wrap(np.stack([t, p], axis=-1))

	def step(self, a, b):
		v = 0.0
		for k, ak, bk in zip(self.k, self.a, self.b):
			v += ak*math.cos(k*a) + bk*math.sin(k*a)
		p = b + self.amplitude*v
		t = (a + 2*math.pi*(self.eps + self.twist*p)) % (2*math.pi)
		return t, p

	def jacobian(self, x):
		x = np.asarray(x, dtype=float)
		w = self.amplitude*self._V(x[...,0], 1)
		c = 2*np.pi*self.twist
		J = np.empty(x.shape[:-1] + (2,2))
		J[...,0,0] = 1 + c*w
		J[...,0,1] = c
		J[...,1,0] = w
		J[...,1,1] = 1.0
		return J

	def has_turns(self):
		return True

	def turns(self, x):
		x = np.asarray(x, dtype=float)
		p = x[...,1] + self.amplitude*self._V(x[...,0])
		return self.eps + self.twist*p


class ComposedMap(PlanarMap):
	"""
	The iterate ``g = f^m``.  Derivative bounds follow the chain rule,
	``d1(f^m) <= d1^m`` and ``d2(f^{m+1}) <= d2 d1^{2m} + d1 d2(f^m)``.

	:param base: the map ``f``
	:param m: number of compositions, at least 1
	"""
	def __init__(self, base, m):
		m = int(m)
		if m < 1:
			raise InvalidParameter("composition count must be >= 1, not %i" % m)
		PlanarMap.__init__(self, 'composed', base.domain,
		                   {'m' : m}, base.det_tol * m)
		self.base    = base
		self.m       = m
		self.d2_mode = base.d2_mode
		d1, d2       = base.d1_bound, base.d2_bound
		with np.errstate(over='ignore'):
			dm = d2
			for j in range(1, m):
				dm = d2 * d1**(2*j) + d1*dm
			self.d1_bound = float(np.float64(d1)**m)
			self.d2_bound = float(dm)

	def eval(self, x):
		y = np.asarray(x, dtype=float)
		for j in range(self.m):
			y = self.base.eval(y)
		return y

	def step(self, a, b):
		for j in range(self.m):
			a, b = self.base.step(a, b)
		return a, b

	def jacobian(self, x):
		y = np.asarray(x, dtype=float)
		J = np.broadcast_to(np.identity(2), y.shape[:-1] + (2,2)).copy()
		for j in range(self.m):
			J = np.einsum('...ij,...jk->...ik', self.base.jacobian(y), J)
			y = self.base.eval(y)
		return J

	def has_turns(self):
		return self.base.has_turns()

	def turns(self, x):
		y = np.asarray(x, dtype=float)
		t = np.zeros(y.shape[:-1])
		for j in range(self.m):
			t = t + self.base.turns(y)
			y = self.base.eval(y)
		return t

	def to_dict(self):
		d = PlanarMap.to_dict(self)
		d['base'] = self.base.to_dict()
		return d


#===============================================================================
# catalog :

_CATALOG = {'rigid-rotation'  : RigidRotation,
            'polar-twist'     : PolarTwist,
            'standard-map'    : StandardMap,
            'linear-saddle'   : LinearSaddle,
            'perturbed-twist' : PerturbedTwist}

_PARAMETERS = {'rigid-rotation'  : ('eps', 'radius'),
               'polar-twist'     : ('rho0', 'rho1', 'radius'),
               'standard-map'    : ('k',),
               'linear-saddle'   : ('mu', 'extent'),
               'perturbed-twist' : ('eps', 'amplitude', 'twist', 'inner',
                                    'outer', 'coefficients')}


def builtin_names():
	"""
	Names of the catalog maps.
	"""
	return sorted(_CATALOG)


def builtin(name, parameters=None, det_tol=None):
	"""
	Instantiate the catalog map ``name``.

	=================== ==========================================
	``rigid-rotation``  ``eps`` (0.1), ``radius`` (1)
	``polar-twist``     ``rho0`` (0.1), ``rho1`` (0.2), ``radius`` (1)
	``standard-map``    ``k`` (1.2)
	``linear-saddle``   ``mu`` (2), ``extent`` (1e6)
	``perturbed-twist`` ``eps`` (golden mean), ``amplitude`` (0.05),
	                    ``twist`` (0), ``inner`` (-1), ``outer`` (1),
	                    ``coefficients``
	=================== ==========================================

	:param name: catalog name
	:param parameters: named parameters overriding the defaults
	:param det_tol: override of the area-preservation tolerance
	:raises UnknownMap: if ``name`` is not in the catalog
	:raises InvalidParameter: for unknown or invalid parameters
	:rtype: :class:`~maps.PlanarMap`
	"""
	if name not in _CATALOG:
		raise UnknownMap("unknown map '%s'; choose one of %s"
		                 % (name, ', '.join(builtin_names())), name=name)
	parameters = dict(parameters or {})
	unknown    = sorted(set(parameters) - set(_PARAMETERS[name]))
	if len(unknown) > 0:
		raise InvalidParameter("map '%s' takes no parameter %s"
		                       % (name, ', '.join(unknown)), unknown=unknown)
	if det_tol is not None:
		parameters['det_tol'] = det_tol
	try:
		return _CATALOG[name](**parameters)
	except (TypeError, ValueError) as e:
		raise InvalidParameter("invalid parameters for '%s' : %s" % (name, e))


def map_from_dict(d):
	"""
	Rebuild a map from the output of :meth:`PlanarMap.to_dict`.
	"""
	if d.get('name') == 'composed':
		return ComposedMap(map_from_dict(d['base']), d['parameters']['m'])
	return builtin(d['name'], d.get('parameters'), d.get('det_tol'))


#===============================================================================
# orbits :

class Orbit(object):
	"""
	Orbit ``x_0, ..., x_n`` with the Jacobians ``Dg(x_0), ..., Dg(x_{n-1})``.

	:param map: the map iterated
	:param points: array of shape ``(n+1, 2)``
	:param jacobians: array of shape ``(n, 2, 2)``
	:param residual: closing residual for periodic orbits, 0 otherwise
	:param period: the period of a periodic orbit, ``None`` otherwise
	"""
	def __init__(self, map, points, jacobians, residual=0.0, period=None):
		self.map       = map
		self.points    = points
		self.jacobians = jacobians
		self.length    = len(points) - 1
		self.residual  = residual
		self.period    = period

	def step_error(self):
		"""
		Largest chart distance between ``g(x_i)`` and ``x_{i+1}``.
		"""
		if self.length == 0:
			return 0.0
		images = self.map.eval(self.points[:-1])
		return float(np.max(self.map.domain.distance(images, self.points[1:])))

	@classmethod
	def periodic(cls, map, z, period, n):
		"""
		The periodic extension to length ``n`` of the ``period``-cycle through
		``z``.  The recorded residual is the closing error
		``|g^period(z) - z|``; the tiled orbit shadows the true cycle.

		:rtype: :class:`~maps.Orbit`
		"""
		cycle, jac, res = periodic_cycle(map, z, period)
		reps   = int(n) // period + 1
		points = np.tile(cycle, (reps + 1, 1))[:int(n)+1]
		jacs   = np.tile(jac, (reps, 1, 1))[:int(n)]
		return cls(map, points, jacs, residual=res, period=period)


def periodic_cycle(map, z, period):
	"""
	The points ``z, g(z), ..., g^{period-1}(z)``, their Jacobians and the
	closing residual ``|g^period(z) - z|``.
	"""
	pts = [np.asarray(z, dtype=float)]
	for i in range(period):
		pts.append(np.asarray(map.step(*pts[-1]), dtype=float))
	pts = np.array(pts)
	res = float(map.domain.distance(pts[-1], pts[0]))
	return pts[:-1], map.jacobian(pts[:-1]), res


def iterate(map, x0, n):
	"""
	Iterate ``map`` ``n`` times from ``x0``.

	:param map: the map
	:param x0: starting point
	:param n: number of steps
	:raises DomainEscape: with the first index outside the domain
	:rtype: :class:`~maps.Orbit`
	"""
	n      = int(n)
	x0     = np.asarray(x0, dtype=float)
	domain = map.domain
	if not domain.contains(x0):
		raise DomainEscape(0, x0)
	pts    = np.empty((n+1, 2))
	pts[0] = domain.wrap(x0)
	a, b   = pts[0]
	for i in range(1, n+1):
		a, b   = map.step(a, b)
		pts[i] = a, b
	inside = domain.contains(pts)
	if not np.all(inside):
		i = int(np.argmin(inside))
		raise DomainEscape(i, pts[i])
	return Orbit(map, pts, map.jacobian(pts[:-1]))


def iterate_many(map, seeds, n):
	"""
	Iterate every seed ``n`` times at once.  Seeds leaving the domain are
	frozen; the returned index array holds the first escape index per seed,
	or ``-1``.

	:rtype: tuple ``(points of shape (n+1, S, 2), escape indices)``
	"""
	x       = map.domain.wrap(np.atleast_2d(np.asarray(seeds, dtype=float)))
	pts     = np.empty((int(n)+1,) + x.shape)
	pts[0]  = x
	escaped = np.where(map.domain.contains(x), -1, 0)
	for i in range(1, int(n)+1):
		y             = map.eval(pts[i-1])
		out           = (~map.domain.contains(y)) & (escaped < 0)
		escaped[out]  = i
		y[escaped >= 0] = pts[i-1][escaped >= 0]
		pts[i]        = y
	return pts, escaped


#===============================================================================
# derivative growth :

class GrowthReport(object):
	"""
	Per-``n`` grid supremum of ``log ||Dg^n||``.  The supremum over a finite
	grid bounds the true supremum from below.
	"""
	def __init__(self, map, n_list, log_norms, argmax, grid_size):
		self.map       = map
		self.n_list    = n_list
		self.log_norms = log_norms
		self.argmax    = argmax
		self.grid_size = grid_size

	def rows(self):
		"""
		One row per ``n`` with ``log_norm``, ``rate = log_norm / n`` and
		``norm`` (``None`` where it overflows).
		"""
		out = []
		for n, l, x in zip(self.n_list, self.log_norms, self.argmax):
			out.append({'n'        : n,
			            'log_norm' : l,
			            'rate'     : l / n,
			            'norm'     : math.exp(l) if l < 700 else None,
			            'x'        : x[0],
			            'y'        : x[1],
			            'bound'    : 'lower'})
		return out

	def to_dict(self):
		"""
		:rtype: dict
		"""
		return {'map' : self.map.to_dict(), 'grid_size' : self.grid_size,
		        'rows' : self.rows()}


def _resolve_grid(map, grid):
	if grid is None:
		return map.domain.grid(16)
	if np.isscalar(grid):
		return map.domain.grid(int(grid))
	return np.atleast_2d(np.asarray(grid, dtype=float))


def _growth_chunk(map, X, n_list):
	X      = np.array(X)
	G      = len(X)
	P      = np.broadcast_to(np.identity(2), (G,2,2)).copy()
	log_s  = np.zeros(G)
	out    = []
	start  = np.array(X)
	marks  = set(n_list)
	for n in range(1, n_list[-1] + 1):
		J      = map.jacobian(X)
		P      = np.einsum('gij,gjk->gik', J, P)
		s      = np.sqrt(np.sum(P**2, axis=(1,2)))
		P      = P / s[:,None,None]
		log_s += np.log(s)
		X      = map.eval(X)
		inside = map.domain.contains(X)
		if not np.all(inside):
			i = int(np.argmin(inside))
			raise DomainEscape(n, X[i], grid_point=[float(c) for c in start[i]])
		if n in marks:
			ln = log_s + np.log(singular_values2(P)[0])
			i  = int(np.argmax(ln))
			out.append((float(ln[i]), [float(c) for c in start[i]]))
	return out


def derivative_growth(map, n_list, sample_grid=None, threads=None):
	"""
	Grid supremum of ``||Dg^n(x)||`` for every ``n`` in ``n_list``.  The
	matrix products are normalized after every step and their logarithmic
	scale accumulated, so no ``n`` overflows.  The grid is split in chunks
	evaluated on ``threads`` threads and reduced in chunk order.

	:param map: the map
	:param n_list: nonempty ascending iteration counts
	:param sample_grid: grid resolution, explicit points, or ``None``
	:raises DomainEscape: with the offending grid point
	:rtype: :class:`~maps.GrowthReport`
	"""
	n_list = [int(n) for n in n_list]
	if len(n_list) == 0 or n_list[0] < 1 or \
	   any(b <= a for a, b in zip(n_list, n_list[1:])):
		raise InvalidParameter("n_list must be nonempty, positive and "
		                       "ascending", n_list=n_list)
	X      = _resolve_grid(map, sample_grid)
	parts  = chunks(len(X), 256)
	res    = parallel_map(lambda c : _growth_chunk(map, X[c[1]:c[2]], n_list),
	                      parts, threads)
	logs   = []
	argmax = []
	for k in range(len(n_list)):
		best = max(range(len(res)), key=lambda c : res[c][k][0])
		logs.append(res[best][k][0])
		argmax.append(res[best][k][1])
	print_min_max(logs, '::: log ||Dg^n|| over n', cls=map)
	return GrowthReport(map, n_list, logs, argmax, len(X))


def lyapunov_qr(map, x0, n):
	"""
	Lyapunov exponents along the orbit of ``x0`` by QR renormalization of
	the tangent cocycle, largest first.

	:rtype: :class:`~numpy.ndarray` of shape ``(2,)``
	"""
	orbit = iterate(map, x0, n)
	Q     = np.identity(2)
	sums  = np.zeros(2)
	for J in orbit.jacobians:
		Q, R  = linalg.qr(np.dot(J, Q))
		sums += np.log(np.abs(np.diag(R)))
	return np.sort(sums / n)[::-1]


#===============================================================================
# periodic points :

def _power(map, x, period):
	# (g^period(x), Dg^period(x)) :
	y = np.asarray(x, dtype=float)
	J = np.identity(2)
	for i in range(period):
		J = np.dot(map.jacobian(y), J)
		y = map.eval(y)
	return y, J


def newton_periodic(map, x0, period, tol=1e-10, max_iter=100):
	"""
	Solve ``g^period(x) = x`` by damped Newton iteration on the chart
	difference, falling back on :func:`scipy.optimize.root` when the damped
	steps stall.

	:param map: the map
	:param x0: starting point
	:param period: the period sought
	:param tol: residual tolerance in chart units
	:param max_iter: largest number of Newton steps
	:raises NewtonDiverged: with the iteration count and the last residual
	:rtype: tuple ``(z, residual, iterations)``
	"""
	domain = map.domain
	period = int(period)

	def F(x):
		y, J = _power(map, x, period)
		return domain.difference(y, x), J - np.identity(2)

	x   = domain.wrap(np.asarray(x0, dtype=float))
	it  = 0
	try:
		f, DF = F(x)
		res   = float(np.linalg.norm(f))
		while res >= tol and it < max_iter:
			it += 1
			if abs(det2(DF)) < 1e-300:
				break
			dx   = -np.dot(inv2(DF), f)
			lam  = 1.0
			while lam > 1e-6:
				x1 = domain.translate(x, lam*dx)
				if domain.contains(x1):
					f1, DF1 = F(x1)
					r1      = float(np.linalg.norm(f1))
					if r1 < res:
						break
				lam *= 0.5
			if lam <= 1e-6:
				break
			x, f, DF, res = x1, f1, DF1, r1
	except (FloatingPointError, OverflowError):
		res = np.inf

	if res >= tol:
		sol = root(lambda v : F(v)[0], x, jac=lambda v : F(v)[1],
		           method='hybr', options={'xtol' : 1e-14})
		z   = domain.wrap(sol.x)
		if domain.contains(z):
			r = float(np.linalg.norm(F(z)[0]))
			if r < res:
				x, res = z, r
		it = max_iter if res >= tol else it + int(sol.nfev)

	if not res < tol:
		raise NewtonDiverged("Newton on g^%i - id stalled at residual %.3e"
		                     % (period, res), iterations=it, residual=res)
	return x, res, it
