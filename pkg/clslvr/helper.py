"""
Shared machinery: the error hierarchy, closed-form 2x2 linear algebra, log-domain
arithmetic and the ordered thread pool used by every grid or seed scan.
"""
from concurrent.futures import ThreadPoolExecutor
import numpy as np
import math
import os


#===============================================================================
# errors :

class ClslvrError(Exception):
	"""
	Base class of every error raised by :mod:`clslvr`.  The message is rendered
	in the ``>>> ... <<<`` banner form and the keyword arguments are kept in
	``self.details`` so that diagnostics can be serialized.

	:param message: human-readable description
	:param details: structured data describing the failure
	:type message: string
	"""
	def __init__(self, message, **details):
		self.message = message
		self.details = details
		super(ClslvrError, self).__init__(message)

	def __str__(self):
		return ">>> %s <<<" % self.message

	def to_dict(self):
		"""
		:rtype: dict
		"""
		d = {'error' : type(self).__name__, 'message' : self.message}
		d.update(self.details)
		return d


class PrecisionExhausted(ClslvrError):    pass
class DepthExceeded(ClslvrError):         pass
class InsufficientDepth(ClslvrError):     pass
class UnknownMap(ClslvrError):            pass
class InvalidParameter(ClslvrError):      pass
class DegenerateSpectrum(ClslvrError):    pass
class PreconditionViolated(ClslvrError):  pass
class ConsequenceViolated(ClslvrError):   pass
class BoundViolated(ClslvrError):         pass
class InvalidTriple(ClslvrError):         pass
class DegenerateFrame(ClslvrError):       pass
class ConeCheckFailed(ClslvrError):       pass
class StripConstructionFailed(ClslvrError): pass
class ReturnMapTooFar(ClslvrError):       pass
class DegreeZero(ClslvrError):            pass
class NewtonDiverged(ClslvrError):        pass
class NonHyperbolicSpectrum(ClslvrError): pass
class InfeasibleIterationCount(ClslvrError): pass
class BudgetExceeded(ClslvrError):        pass
class ConfigError(ClslvrError):           pass


class DomainEscape(ClslvrError):
	"""
	Raised when an orbit leaves the domain of its map.  ``index`` is the first
	orbit index outside the domain and ``point`` the offending point.
	"""
	def __init__(self, index, point, **details):
		self.index = index
		self.point = [float(c) for c in np.ravel(point)]
		super(DomainEscape, self).__init__(
		      "orbit left the domain at index %i, point %s" % (index, self.point),
		      index=index, point=self.point, **details)


class ScheduleCheckFailed(ClslvrError):
	"""
	Raised by :func:`~certifier.build_schedule` when one of the schedule
	inequalities fails.  The schedule is still available in ``self.schedule``.
	"""
	def __init__(self, failures, schedule):
		self.failures = failures
		self.schedule = schedule
		names = sorted(set(f['check'] for f in failures))
		super(ScheduleCheckFailed, self).__init__(
		      "schedule checks failed : %s" % ', '.join(names),
		      failures=failures)


class StageError(ClslvrError):
	"""
	Wraps an upstream error with the tag of the pipeline stage it came from.
	"""
	def __init__(self, stage, error):
		self.stage = stage
		self.error = error
		details    = error.to_dict() if isinstance(error, ClslvrError) \
		             else {'error' : type(error).__name__, 'message' : str(error)}
		super(StageError, self).__init__("stage '%s' failed : %s"
		                                 % (stage, details['message']),
		                                 stage=stage, cause=details)


class NotFound(object):
	"""
	Result value of a search that came back empty.  It is not an exception :
	callers test for it with ``isinstance`` and read the statistics.

	:param reason: short description of why nothing was found
	:param statistics: counters gathered by the search
	:type reason: string
	:type statistics: dict
	"""
	def __init__(self, reason, statistics=None):
		self.reason     = reason
		self.statistics = statistics or {}

	def __bool__(self):
		return False

	def to_dict(self):
		"""
		:rtype: dict
		"""
		return {'found' : False, 'reason' : self.reason,
		        'statistics' : self.statistics}


#===============================================================================
# 2x2 linear algebra, vectorized over leading axes :

def perp(v):
	"""
	Rotate the vector(s) ``v`` by a quarter turn counter-clockwise.
	"""
	v = np.asarray(v, dtype=float)
	return np.stack([-v[...,1], v[...,0]], axis=-1)


def det2(m):
	"""
	Determinant of the 2x2 matrices ``m``.
	"""
	m = np.asarray(m, dtype=float)
	return m[...,0,0]*m[...,1,1] - m[...,0,1]*m[...,1,0]


def inv2(m):
	"""
	Inverse of the 2x2 matrices ``m`` through the adjugate.
	"""
	m   = np.asarray(m, dtype=float)
	d   = det2(m)
	adj = np.empty_like(m)
	adj[...,0,0] =  m[...,1,1]
	adj[...,1,1] =  m[...,0,0]
	adj[...,0,1] = -m[...,0,1]
	adj[...,1,0] = -m[...,1,0]
	return adj / d[...,None,None]


def singular_values2(m):
	"""
	Singular values ``(s_max, s_min)`` of the 2x2 matrices ``m``.  The smaller
	one is recovered as ``|det| / s_max`` so that it keeps full relative
	accuracy even when the matrix is nearly singular.
	"""
	m     = np.asarray(m, dtype=float)
	fro2  = np.sum(m**2, axis=(-2,-1))
	d     = np.abs(det2(m))
	disc  = np.sqrt(np.maximum((fro2 - 2*d)*(fro2 + 2*d), 0.0))
	s_max = np.sqrt(0.5*(fro2 + disc))
	with np.errstate(divide='ignore', invalid='ignore'):
		s_min = np.where(s_max > 0, d / s_max, 0.0)
	return s_max, s_min


def norm2(m):
	"""
	Spectral norm of the 2x2 matrices ``m``.
	"""
	return singular_values2(m)[0]


def _top_eigenvector_sym(a, b, c):
	# top eigenvector of [[a, b], [b, c]] :
	phi = 0.5*np.arctan2(2*b, a - c)
	return np.stack([np.cos(phi), np.sin(phi)], axis=-1)


def top_singular_vectors(m):
	"""
	Top right and left singular vectors ``(v_max, u_max)`` of the 2x2 matrices
	``m``, signed so that ``m v_max`` is a positive multiple of ``u_max``.
	The dominant pair is well conditioned, the minor pair is obtained from it
	with :func:`perp`.
	"""
	m     = np.asarray(m, dtype=float)
	mtm_a = m[...,0,0]**2 + m[...,1,0]**2
	mtm_c = m[...,0,1]**2 + m[...,1,1]**2
	mtm_b = m[...,0,0]*m[...,0,1] + m[...,1,0]*m[...,1,1]
	v     = _top_eigenvector_sym(mtm_a, mtm_b, mtm_c)
	u     = np.einsum('...ij,...j->...i', m, v)
	n     = np.linalg.norm(u, axis=-1)
	u     = u / n[...,None]
	return v, u


def cot_angle(u, v):
	"""
	Absolute cotangent of the angle between the vectors ``u`` and ``v``;
	``inf`` for parallel vectors.
	"""
	u     = np.asarray(u, dtype=float)
	v     = np.asarray(v, dtype=float)
	dot   = np.sum(u*v, axis=-1)
	cross = np.abs(u[...,0]*v[...,1] - u[...,1]*v[...,0])
	with np.errstate(divide='ignore', invalid='ignore'):
		return np.where(cross > 0, np.abs(dot) / np.where(cross > 0, cross, 1.0),
		                np.inf)


def vector_angle(u, v):
	"""
	Unoriented angle in ``[0, pi]`` between the vectors ``u`` and ``v``.
	"""
	u     = np.asarray(u, dtype=float)
	v     = np.asarray(v, dtype=float)
	dot   = np.sum(u*v, axis=-1)
	cross = u[...,0]*v[...,1] - u[...,1]*v[...,0]
	return np.arctan2(np.abs(cross), dot)


def wrap_angle(x):
	"""
	Reduce angles ``x`` to the interval ``(-pi, pi]``.
	"""
	x = np.asarray(x, dtype=float)
	y = np.mod(x + np.pi, 2*np.pi) - np.pi
	return np.where(y == -np.pi, np.pi, y)


def accumulate_product(jacobians):
	"""
	Log-scaled accumulation of the product ``J[n-1] ... J[1] J[0]``.  The
	running product is divided by its Frobenius norm after every step, so
	the returned matrix has unit Frobenius norm and the true product is
	``exp(log_scale) * P``.

	:param jacobians: sequence of 2x2 matrices
	:rtype: tuple ``(P, log_scale, log_det)``
	"""
	a, b, c, d = 1.0, 0.0, 0.0, 1.0
	log_s      = 0.0
	log_det    = 0.0
	for j00, j01, j10, j11 in np.reshape(jacobians, (-1, 4)).tolist():
		a, b, c, d = j00*a + j01*c, j00*b + j01*d, j10*a + j11*c, j10*b + j11*d
		s          = math.sqrt(a*a + b*b + c*c + d*d)
		a, b, c, d = a/s, b/s, c/s, d/s
		log_s     += math.log(s)
		log_det   += math.log(abs(j00*j11 - j01*j10))
	return np.array([[a, b], [c, d]]), log_s, log_det


#===============================================================================
# log-domain arithmetic :

def log_add(x, y):
	"""
	``log(exp(x) + exp(y))`` without overflow.
	"""
	return float(np.logaddexp(x, y))


def log_sub(x, y):
	"""
	``log(exp(x) - exp(y))`` for ``x > y``; ``-inf`` when ``x == y`` and
	``nan`` when ``y > x``.
	"""
	if y == -np.inf:
		return x
	if y > x:
		return float('nan')
	if y == x:
		return -np.inf
	return x + math.log1p(-math.exp(y - x))


def log1p_exp(x):
	"""
	``log(1 + exp(x))``.
	"""
	return float(np.logaddexp(0.0, x))


#===============================================================================
# parameters :

def merge_params(defaults, overrides, name='parameters'):
	"""
	Return a copy of ``defaults`` updated with ``overrides``.  Keys missing
	from ``defaults`` are rejected.

	:param defaults: the default parameter dictionary
	:param overrides: user-supplied values, or ``None``
	:param name: label used in the error message
	:type defaults: dict
	:type overrides: dict
	:rtype: dict
	"""
	params = dict(defaults)
	if overrides is None:
		return params
	if not isinstance(overrides, dict):
		raise ConfigError("%s must be a 'dict' instance, not %s"
		                  % (name, type(overrides).__name__))
	unknown = sorted(set(overrides) - set(defaults))
	if len(unknown) > 0:
		raise ConfigError("unknown %s : %s" % (name, ', '.join(unknown)),
		                  unknown=unknown, allowed=sorted(defaults))
	params.update(overrides)
	return params


#===============================================================================
# threads :

def default_threads():
	"""
	Thread count from the ``CLSLVR_THREADS`` environment variable, 1 if unset.

	:rtype: int
	"""
	value = os.environ.get('CLSLVR_THREADS', '1')
	try:
		n = int(value)
	except ValueError:
		raise ConfigError("CLSLVR_THREADS must be an integer, not '%s'" % value)
	return max(n, 1)


def parallel_map(func, items, threads=None):
	"""
	Apply ``func`` to every element of ``items`` with a pool of ``threads``
	threads and return the results in input order.  Reductions over the
	result are therefore independent of the thread count.

	:param func: callable of one argument
	:param items: iterable of arguments
	:param threads: pool size, ``None`` for :func:`default_threads`
	:rtype: list
	"""
	items   = list(items)
	threads = default_threads() if threads is None else max(int(threads), 1)
	if threads == 1 or len(items) < 2:
		return [func(x) for x in items]
	with ThreadPoolExecutor(max_workers=threads) as pool:
		return list(pool.map(func, items))


def chunks(n, size):
	"""
	Split ``range(n)`` into consecutive ``(index, start, stop)`` chunks of
	``size`` elements; the last chunk may be shorter.
	"""
	return [(i, s, min(s + size, n)) for i, s in enumerate(range(0, n, size))]
