"""
Continued-fraction arithmetic of rotation numbers.

Quadratic surds are expanded exactly through their periodic continued fraction
and every comparison against them reduces to the sign of an integer
expression ``A + B sqrt(d)``.  Series, decimal literals and finite quotient
prefixes are carried as certified rational intervals : a partial quotient is
only emitted once both ends of the interval agree on it, so precision never
degrades silently.
"""
from clslvr.helper      import PrecisionExhausted, DepthExceeded, \
                               InsufficientDepth, InvalidParameter, \
                               merge_params
from clslvr.inputoutput import print_text
from sympy              import Rational, continued_fraction_periodic, \
                               integer_nthroot
import numpy                as np
import mpmath
import math


#===============================================================================
# exact helpers :

def _surd_sign(A, B, d):
	"""
	Sign of ``A + B sqrt(d)`` for integers ``A``, ``B`` and a non-square ``d``.
	"""
	if B == 0 or d == 0:
		return (A > 0) - (A < 0)
	sB = 1 if B > 0 else -1
	if A == 0:
		return sB
	sA = 1 if A > 0 else -1
	if sA == sB:
		return sA
	c = A*A - B*B*d
	if c == 0:
		return 0
	return sA if c > 0 else sB


def _rational_quotients(x, limit):
	"""
	Euclid's algorithm on the rational ``x``; returns at most ``limit``
	quotients ``a_0, a_1, ...`` and whether the expansion terminated.
	"""
	p, q = int(x.p), int(x.q)
	out  = []
	while q != 0 and len(out) < limit:
		a, r = divmod(p, q)
		out.append(a)
		p, q = q, r
	return out, q == 0


def _certified_quotients(lo, hi, depth):
	"""
	Partial quotients ``a_1, ..., a_k`` shared by every number of the interval
	``[lo, hi]``, with ``k <= depth``.
	"""
	lo_a, lo_done = _rational_quotients(lo, depth + 2)
	hi_a, hi_done = _rational_quotients(hi, depth + 2)

	# a finished expansion has two spellings, so its last quotient is unsafe :
	if lo_done: lo_a = lo_a[:-1]
	if hi_done: hi_a = hi_a[:-1]

	common = []
	for a, b in zip(lo_a, hi_a):
		if a != b:
			break
		common.append(a)
	return common[1:depth+1]


#===============================================================================
# irrational numbers :

class IrrationalSpec(object):
	"""
	An irrational number in ``(0,1)`` given in one of four ways :

	* ``quadratic-surd`` : ``(p + s sqrt(d)) / q``, exact.
	* ``rational-series`` : ``sum 10^(-e_i)`` over strictly increasing
	  exponents, with every omitted exponent at least ``tail``.
	* ``decimal-literal`` : a digit string accurate to its last digit.
	* ``partial-quotients`` : a finite prefix ``a_1, ..., a_N`` of the
	  continued fraction.

	Instances are built with the class methods or with :func:`parse_irrational`
	and are immutable.
	"""
	KINDS = ('quadratic-surd', 'rational-series', 'decimal-literal',
	         'partial-quotients')

	def __init__(self, kind, text, **data):
		"""
		Use the class methods instead.
		"""
		if kind not in self.KINDS:
			raise InvalidParameter("unknown irrational kind '%s'" % kind)
		self.kind  = kind
		self.text  = text
		self.data  = data
		self._cf   = None

	def color(self):
		"""
		return the default color for this class.
		"""
		return '111'

	@classmethod
	def surd(cls, s, p, d, q):
		"""
		The quadratic surd ``(p + s sqrt(d)) / q``.

		:param s: coefficient of the square root, nonzero
		:param p: integer offset
		:param d: radicand, a positive non-square integer
		:param q: denominator, nonzero
		:rtype: :class:`~arithmetic.IrrationalSpec`
		"""
		s, p, d, q = int(s), int(p), int(d), int(q)
		if d <= 0 or integer_nthroot(d, 2)[1]:
			raise InvalidParameter("surd radicand must be a positive "
			                       "non-square integer, not %i" % d)
		if s == 0 or q == 0:
			raise InvalidParameter("surd coefficients 's' and 'q' must be "
			                       "nonzero")
		if q < 0:
			s, p, q = -s, -p, -q
		if not (_surd_sign(p, s, d) > 0 and _surd_sign(p - q, s, d) < 0):
			raise InvalidParameter("surd (%i + %i sqrt(%i))/%i is not in (0,1)"
			                       % (p, s, d, q))
		text = 'surd:%i,%i,%i,%i' % (s, p, d, q)
		return cls('quadratic-surd', text, s=s, p=p, d=d, q=q)

	@classmethod
	def series(cls, exponents, tail=None):
		"""
		The sum of ``10^(-e)`` over ``exponents``; the remaining terms of the
		series have exponents ``>= tail`` (default ``2 e_k``).

		:rtype: :class:`~arithmetic.IrrationalSpec`
		"""
		e = [int(x) for x in exponents]
		if len(e) == 0 or e[0] < 1 or any(b <= a for a, b in zip(e, e[1:])):
			raise InvalidParameter("series exponents must be positive and "
			                       "strictly increasing", exponents=e)
		tail = 2*e[-1] if tail is None else int(tail)
		if tail <= e[-1]:
			raise InvalidParameter("series tail exponent %i must exceed %i"
			                       % (tail, e[-1]))
		text = 'series:%s/%i' % (','.join(str(x) for x in e), tail)
		return cls('rational-series', text, exponents=e, tail=tail)

	@classmethod
	def liouville(cls, N):
		"""
		The Liouville-type number ``sum_{n>=1} 10^(-n!)`` truncated at ``n = N``
		with tail exponent ``(N+1)!``.

		:rtype: :class:`~arithmetic.IrrationalSpec`
		"""
		N = int(N)
		if N < 1 or N > 9:
			raise InvalidParameter("liouville truncation must lie in [1, 9], "
			                       "not %i" % N)
		spec      = cls.series([math.factorial(n) for n in range(1, N+1)],
		                       math.factorial(N+1))
		spec.text = 'liouville:%i' % N
		return spec

	@classmethod
	def decimal(cls, digits):
		"""
		The decimal literal ``0.ddd...``, accurate to ``10^(-k)`` for ``k``
		digits.

		:rtype: :class:`~arithmetic.IrrationalSpec`
		"""
		digits = str(digits).strip()
		head, _, frac = digits.partition('.')
		if head not in ('', '0') or len(frac) == 0 or not frac.isdigit():
			raise InvalidParameter("decimal literal must read '0.ddd...', "
			                       "not '%s'" % digits)
		k  = len(frac)
		x  = Rational(int(frac), 10**k)
		lo = x - Rational(1, 10**k)
		hi = x + Rational(1, 10**k)
		if lo <= 0 or hi >= 1:
			raise InvalidParameter("decimal literal '%s' is too close to an "
			                       "integer" % digits)
		return cls('decimal-literal', 'dec:0.%s' % frac, digits=frac)

	@classmethod
	def quotients(cls, quotients):
		"""
		A number whose continued fraction starts with ``quotients``.

		:rtype: :class:`~arithmetic.IrrationalSpec`
		"""
		a = [int(x) for x in quotients]
		if len(a) == 0 or any(x < 1 for x in a):
			raise InvalidParameter("partial quotients must be positive "
			                       "integers", quotients=a)
		text = 'cf:%s' % ','.join(str(x) for x in a)
		return cls('partial-quotients', text, quotients=a)

	def is_exact(self):
		"""
		``True`` if comparisons against this number are exact.
		"""
		return self.kind == 'quadratic-surd'

	def interval(self):
		"""
		Rational enclosure ``(lo, hi)`` of the represented value.  Exact surds
		have no enclosure and return ``None``.

		:rtype: tuple of :class:`~sympy.core.numbers.Rational`
		"""
		if self.kind == 'quadratic-surd':
			return None

		elif self.kind == 'rational-series':
			e    = self.data['exponents']
			E    = e[-1]
			lo   = Rational(sum(10**(E - x) for x in e), 10**E)
			hi   = lo + Rational(10, 9) / 10**self.data['tail']
			return lo, hi

		elif self.kind == 'decimal-literal':
			k    = len(self.data['digits'])
			x    = Rational(int(self.data['digits']), 10**k)
			return x - Rational(1, 10**k), x + Rational(1, 10**k)

		else:
			cf     = ContinuedFraction(self.data['quotients'])
			p1, q1 = cf.convergents[-1]
			p0, q0 = cf.convergents[-2]
			a, b   = Rational(p1, q1), Rational(p1 + p0, q1 + q0)
			return min(a, b), max(a, b)

	def value(self, dps=30):
		"""
		Decimal approximation with ``dps`` digits; for interval kinds the
		midpoint of the enclosure.

		:rtype: :class:`mpmath.mpf`
		"""
		with mpmath.workdps(dps):
			if self.kind == 'quadratic-surd':
				s, p, d, q = [self.data[k] for k in ('s', 'p', 'd', 'q')]
				return (p + s*mpmath.sqrt(d)) / q
			lo, hi = self.interval()
			mid    = (lo + hi) / 2
			return mpmath.mpf(int(mid.p)) / int(mid.q)

	def partial_quotients(self, depth):
		"""
		The first ``depth`` partial quotients ``a_1, ..., a_depth``.

		:raises PrecisionExhausted: if fewer quotients are certified
		:rtype: list of int
		"""
		if self.kind == 'quadratic-surd':
			return self._surd_quotients(depth)

		if self.kind == 'partial-quotients':
			a = self.data['quotients']
		else:
			lo, hi = self.interval()
			a      = _certified_quotients(lo, hi, depth)
		if len(a) < depth:
			raise PrecisionExhausted("'%s' resolves only %i partial quotients, "
			                         "%i requested" % (self.text, len(a), depth),
			                         certified=len(a), depth=depth)
		return list(a[:depth])

	def _surd_quotients(self, depth):
		if self._cf is None:
			d        = self.data
			self._cf = continued_fraction_periodic(d['p'], d['q'], d['d'], d['s'])
		terms = list(self._cf)
		if len(terms) > 0 and isinstance(terms[-1], list):
			head, period = terms[:-1], terms[-1]
		else:
			head, period = terms, []
		out = [int(a) for a in head]
		i   = 0
		while len(out) < depth + 1:
			out.append(int(period[i % len(period)]))
			i += 1
		# a_0 = 0 for numbers in (0,1) :
		return out[1:depth+1]

	def sign_of(self, q, p):
		"""
		Sign of ``q alpha - p`` for integers ``q`` and ``p``.  Exact for surds;
		for interval kinds the pair of signs at both ends of the enclosure.
		"""
		if self.kind == 'quadratic-surd':
			d = self.data
			return _surd_sign(q*d['p'] - p*d['q'], q*d['s'], d['d'])
		lo, hi = self.interval()
		return (_rsign(q*lo - p), _rsign(q*hi - p))

	def to_string(self):
		"""
		The command-line spelling of this number.
		"""
		return self.text

	def to_dict(self):
		"""
		:rtype: dict
		"""
		return {'kind' : self.kind, 'text' : self.text}

	def __repr__(self):
		return "IrrationalSpec('%s')" % self.text

	def __eq__(self, other):
		return isinstance(other, IrrationalSpec) and other.text == self.text

	def __hash__(self):
		return hash(self.text)


def _rsign(x):
	return bool(x > 0) - bool(x < 0)


def parse_irrational(text):
	"""
	Parse the command-line spelling of an irrational number :

	============================  ============================================
	``surd:s,p,d,q``              ``(p + s sqrt(d)) / q``
	``liouville:N``               ``sum_{n<=N} 10^(-n!)``, tail ``(N+1)!``
	``series:e1,...,ek[/tail]``   ``sum 10^(-e_i)``, tail default ``2 e_k``
	``dec:0.ddd...``              decimal literal
	``cf:a1,...,aN``              continued-fraction prefix
	============================  ============================================

	:param text: the spelling, or an :class:`IrrationalSpec` returned as is
	:rtype: :class:`~arithmetic.IrrationalSpec`
	"""
	if isinstance(text, IrrationalSpec):
		return text
	kind, sep, body = str(text).strip().partition(':')
	if not sep:
		raise InvalidParameter("irrational '%s' lacks a 'kind:' prefix" % text)
	try:
		if kind == 'surd':
			fields = [int(x) for x in body.split(',')]
			if len(fields) != 4:
				raise InvalidParameter("'surd:' takes four integers s,p,d,q")
			return IrrationalSpec.surd(*fields)
		elif kind == 'liouville':
			return IrrationalSpec.liouville(int(body))
		elif kind == 'series':
			terms, _, tail = body.partition('/')
			tail = int(tail) if tail else None
			return IrrationalSpec.series([int(x) for x in terms.split(',')], tail)
		elif kind == 'dec':
			return IrrationalSpec.decimal(body)
		elif kind == 'cf':
			return IrrationalSpec.quotients([int(x) for x in body.split(',')])
	except ValueError:
		raise InvalidParameter("malformed irrational '%s'" % text)
	raise InvalidParameter("unknown irrational kind '%s' in '%s'" % (kind, text))


#===============================================================================
# continued fractions :

class ContinuedFraction(object):
	"""
	Partial quotients ``a_1, ..., a_N`` and convergents ``p_n / q_n`` for
	``n = 0, ..., N``, with ``p_0 = 0`` and ``q_0 = 1``.

	:param partial_quotients: positive integers
	:param alpha: the number expanded, if known
	:type alpha: :class:`IrrationalSpec`
	"""
	def __init__(self, partial_quotients, alpha=None):
		self.partial_quotients = tuple(int(a) for a in partial_quotients)
		if any(a < 1 for a in self.partial_quotients):
			raise InvalidParameter("partial quotients must be positive")
		self.alpha = alpha
		self.depth = len(self.partial_quotients)

		p_m, q_m = 1, 0
		p,   q   = 0, 1
		conv     = [(p, q)]
		for a in self.partial_quotients:
			p, p_m = a*p + p_m, p
			q, q_m = a*q + q_m, q
			conv.append((p, q))
		self.convergents = tuple(conv)

	def color(self):
		"""
		return the default color for this class.
		"""
		return '111'

	def p(self, n):
		"""
		Numerator of the ``n``-th convergent.
		"""
		return self.convergents[n][0]

	def q(self, n):
		"""
		Denominator of the ``n``-th convergent.
		"""
		return self.convergents[n][1]

	def denominators(self):
		"""
		The list ``q_0, ..., q_N``.
		"""
		return [c[1] for c in self.convergents]

	def validate(self):
		"""
		Re-check every invariant of the expansion :

		* ``recurrence`` : ``q_{n+1} = a_{n+1} q_n + q_{n-1}``, same for ``p``.
		* ``determinant`` : ``p_{n+1} q_n - p_n q_{n+1} = +-1``.
		* ``increasing`` : ``q_n`` strictly increasing for ``n >= 1``.
		* ``alternating`` : ``q_n alpha - p_n`` has sign ``(-1)^n``.
		* ``best_approximation`` : ``|q_n alpha - p_n| < 1/q_{n+1}``.

		The last two need ``alpha``; they are exact for surds and checked at
		both ends of the enclosure otherwise, non-strictly at the ends.

		:rtype: dict of bool
		"""
		a    = self.partial_quotients
		conv = self.convergents
		rec  = True
		det  = True
		for n in range(self.depth):
			p0, q0 = conv[n]
			p1, q1 = conv[n+1]
			pm, qm = conv[n-1] if n > 0 else (1, 0)
			rec    = rec and p1 == a[n]*p0 + pm and q1 == a[n]*q0 + qm
			det    = det and abs(p1*q0 - p0*q1) == 1
		q   = self.denominators()
		inc = all(q[n+1] > q[n] for n in range(1, self.depth))

		report = {'recurrence' : rec, 'determinant' : det, 'increasing' : inc}
		if self.alpha is None:
			return report

		alt  = True
		best = True
		for n in range(self.depth + 1):
			p0, q0 = conv[n]
			sgn    = 1 if n % 2 == 0 else -1
			if self.alpha.is_exact():
				alt = alt and self.alpha.sign_of(q0, p0) == sgn
				if n < self.depth:
					q1   = conv[n+1][1]
					best = best and self._surd_within(q0, p0, q1)
			else:
				s_lo, s_hi = self.alpha.sign_of(q0, p0)
				alt = alt and sgn*s_lo >= 0 and sgn*s_hi >= 0 \
				          and (s_lo, s_hi) != (0, 0)
				if n < self.depth:
					q1     = conv[n+1][1]
					lo, hi = self.alpha.interval()
					bound  = Rational(1, q1)
					best   = best and abs(q0*lo - p0) <= bound \
					              and abs(q0*hi - p0) <= bound
		report['alternating']        = alt
		report['best_approximation'] = best
		return report

	def _surd_within(self, q0, p0, q1):
		# |q0 alpha - p0| < 1/q1 for alpha = (P + S sqrt(d))/Q :
		d  = self.alpha.data
		X  = q0*d['p'] - p0*d['q']
		Y  = q0*d['s']
		return _surd_sign(q1*X - d['q'], q1*Y, d['d']) < 0 and \
		       _surd_sign(q1*X + d['q'], q1*Y, d['d']) > 0

	def is_valid(self):
		"""
		``True`` if every check of :meth:`validate` passes.
		"""
		return all(self.validate().values())

	def to_dict(self):
		"""
		:rtype: dict
		"""
		return {'alpha'             : None if self.alpha is None \
		                              else self.alpha.to_string(),
		        'depth'             : self.depth,
		        'partial_quotients' : list(self.partial_quotients),
		        'convergents'       : [list(c) for c in self.convergents]}


def from_quotients(quotients, alpha=None):
	"""
	Build a :class:`ContinuedFraction` directly from its partial quotients.
	"""
	return ContinuedFraction(quotients, alpha)


def cf_expand(alpha, depth):
	"""
	Expand ``alpha`` to ``depth`` partial quotients.

	:param alpha: the number, or its command-line spelling
	:param depth: number of partial quotients, at least 1
	:type alpha: :class:`IrrationalSpec` or string
	:type depth: int
	:raises PrecisionExhausted: if ``alpha`` does not resolve ``depth``
	                            quotients
	:rtype: :class:`~arithmetic.ContinuedFraction`
	"""
	alpha = parse_irrational(alpha)
	depth = int(depth)
	if depth < 1:
		raise InvalidParameter("depth must be at least 1, not %i" % depth)
	return ContinuedFraction(alpha.partial_quotients(depth), alpha)


def distance_to_integers(alpha, q):
	"""
	The distance ``||q alpha||`` from ``q alpha`` to the nearest integer.

	For surds the nearest integer is located exactly and the distance is
	evaluated with enough digits to absorb the cancellation in
	``q alpha - p``.  For interval kinds the distance at the midpoint is
	returned once the enclosure pins it to six significant digits.

	:param alpha: the number, or its command-line spelling
	:param q: a positive integer
	:raises PrecisionExhausted: if the enclosure is too wide for ``q``
	:rtype: :class:`mpmath.mpf`
	"""
	alpha = parse_irrational(alpha)
	q     = int(q)
	if q < 1:
		raise InvalidParameter("q must be a positive integer, not %i" % q)

	if alpha.is_exact():
		d   = alpha.data
		dps = 30 + 2*len(str(q))
		with mpmath.workdps(dps):
			x = q * alpha.value(dps)
			m = int(mpmath.floor(x))
			# exact correction of the floor :
			while alpha.sign_of(q, m) < 0:
				m -= 1
			while alpha.sign_of(q, m + 1) >= 0:
				m += 1
			frac = q*(d['p'] + d['s']*mpmath.sqrt(d['d'])) / d['q'] - m
			return +min(frac, 1 - frac)

	lo, hi = alpha.interval()
	mid    = (lo + hi) / 2
	x      = q * mid
	m      = int(x.p) // int(x.q)
	frac   = x - m
	dist   = min(frac, 1 - frac)
	err    = q * (hi - lo) / 2
	if dist == 0 or err >= dist * Rational(1, 10**6):
		raise PrecisionExhausted("'%s' is too coarse to resolve ||%i alpha||"
		                         % (alpha.text, q), q=q)
	with mpmath.workdps(30):
		return mpmath.mpf(int(dist.p)) / int(dist.q)


#===============================================================================
# Brjuno sums and classification :

def _ln(n):
	return mpmath.log(mpmath.mpf(n))


def brjuno_partial_sum(cf, N):
	"""
	The Brjuno partial sum ``sum_{n=0}^{N} ln(q_{n+1}) / q_n``.

	:param cf: the expansion
	:param N: last index summed, at most ``cf.depth - 1``
	:type cf: :class:`ContinuedFraction`
	:raises DepthExceeded: if ``N > cf.depth - 1``
	:rtype: float
	"""
	N = int(N)
	if N < 0:
		raise InvalidParameter("N must be nonnegative, not %i" % N)
	if N > cf.depth - 1:
		raise DepthExceeded("Brjuno sum to N = %i needs depth %i, have %i"
		                    % (N, N + 1, cf.depth), N=N, depth=cf.depth)
	q = cf.denominators()
	with mpmath.workdps(30):
		s = mpmath.fsum(_ln(q[n+1]) / q[n] for n in range(N + 1))
	return float(s)


def brjuno_tail(cf, N):
	"""
	The computable part of the Brjuno tail beyond ``N``, that is
	``brjuno_partial_sum(cf, depth-1) - brjuno_partial_sum(cf, N)``, summed
	directly.

	:rtype: float
	"""
	N = int(N)
	if N > cf.depth - 1:
		raise DepthExceeded("tail from N = %i exceeds depth %i"
		                    % (N, cf.depth), N=N, depth=cf.depth)
	q = cf.denominators()
	with mpmath.workdps(30):
		s = mpmath.fsum(_ln(q[n+1]) / q[n] for n in range(N + 1, cf.depth))
	return float(s)


def brjuno_terms(cf):
	"""
	The terms ``ln(q_{n+1}) / q_n`` for ``n = 0, ..., depth - 1``.

	:rtype: list of float
	"""
	q = cf.denominators()
	with mpmath.workdps(30):
		return [float(_ln(q[n+1]) / q[n]) for n in range(cf.depth)]


def default_classification_params():
	"""
	Returns the default thresholds of :func:`classify`.

	:rtype: dict
	"""
	params = {'super_liouville'   : 1.5,
	          'brjuno_divergence' : 10.0}
	return params


class Classification(object):
	"""
	Finite-depth evidence about the arithmetic type of a rotation number.
	The label never claims the infinite-depth property; it records the depth
	it was drawn from.
	"""
	LABELS = ('brjuno-consistent', 'non-brjuno-evidence',
	          'super-liouville-evidence')

	def __init__(self, label, depth, max_term, max_index, partial_sum,
	             thresholds, witness):
		self.label       = label
		self.depth       = depth
		self.max_term    = max_term
		self.max_index   = max_index
		self.partial_sum = partial_sum
		self.thresholds  = thresholds
		self.witness     = witness

	def color(self):
		"""
		return the default color for this class.
		"""
		return '111'

	def to_dict(self):
		"""
		:rtype: dict
		"""
		return {'label'       : self.label,
		        'depth'       : self.depth,
		        'max_term'    : self.max_term,
		        'max_index'   : self.max_index,
		        'partial_sum' : self.partial_sum,
		        'thresholds'  : self.thresholds,
		        'witness'     : self.witness}


def classify(cf, thresholds=None):
	"""
	Label ``cf`` with finite-depth evidence :

	* ``super-liouville-evidence`` if ``max_n ln(q_{n+1}) / q_n`` exceeds
	  ``thresholds['super_liouville']``; the witness is the maximizing index.
	* ``non-brjuno-evidence`` otherwise, if the Brjuno partial sum exceeds
	  ``thresholds['brjuno_divergence']``; the witness lists the indices
	  summed up to the first crossing.
	* ``brjuno-consistent`` otherwise, with an empty witness.

	:param cf: expansion of depth at least 3
	:param thresholds: overrides of :func:`default_classification_params`
	:rtype: :class:`~arithmetic.Classification`
	"""
	params = merge_params(default_classification_params(), thresholds,
	                      'classification thresholds')
	if cf.depth < 3:
		raise InsufficientDepth("classification needs depth >= 3, have %i"
		                        % cf.depth, produced=0)

	terms     = brjuno_terms(cf)
	max_index = int(np.argmax(terms))
	max_term  = terms[max_index]
	partial   = np.cumsum(terms)

	if max_term > params['super_liouville']:
		label   = 'super-liouville-evidence'
		witness = [max_index]
	elif partial[-1] > params['brjuno_divergence']:
		label   = 'non-brjuno-evidence'
		cross   = int(np.argmax(partial > params['brjuno_divergence']))
		witness = list(range(cross + 1))
	else:
		label   = 'brjuno-consistent'
		witness = []

	print_text("::: %s at depth %i : max term %.4g (n = %i), partial sum %.6g :::"
	           % (label, cf.depth, max_term, max_index, partial[-1]),
	           cls=cf)
	return Classification(label, cf.depth, max_term, max_index,
	                      float(partial[-1]), params, witness)


class SuperLiouvilleProfile(object):
	"""
	The sequence ``log(q_n^-1 a^q_n ln q_{n+1})``; Hoelder rigidity asks it
	to be unbounded along a subsequence.
	"""
	def __init__(self, a, values):
		self.a      = a
		self.values = values
		finite      = [(n, v) for n, v in enumerate(values) if np.isfinite(v)]
		if len(finite) > 0:
			self.argmax = max(finite, key=lambda t: t[1])[0]
			self.max    = values[self.argmax]
		else:
			self.argmax = None
			self.max    = -np.inf
		if len(finite) >= 2:
			n, v       = zip(*finite)
			self.trend = float(np.polyfit(n, v, 1)[0])
		else:
			self.trend = 0.0

	def to_dict(self):
		"""
		:rtype: dict
		"""
		return {'a' : self.a, 'values' : self.values, 'max' : self.max,
		        'argmax' : self.argmax, 'trend' : self.trend}


def superliouville_profile(cf, a):
	"""
	Evaluate ``log(q_n^-1 a^q_n ln q_{n+1})`` for ``n = 0, ..., depth-1`` in
	log domain.  Entries where ``q_{n+1} = 1`` are ``-inf``.

	:param cf: the expansion
	:param a: Hoelder exponent in ``(0, 1]``
	:rtype: :class:`~arithmetic.SuperLiouvilleProfile`
	"""
	a = float(a)
	if not 0 < a <= 1:
		raise InvalidParameter("Hoelder exponent must lie in (0,1], not %g" % a)
	q      = cf.denominators()
	values = []
	with mpmath.workdps(30):
		la = mpmath.log(a)
		for n in range(cf.depth):
			lq1 = _ln(q[n+1])
			if lq1 == 0:
				values.append(-np.inf)
				continue
			v = mpmath.log(lq1) - _ln(q[n]) + q[n]*la
			values.append(float(v))
	return SuperLiouvilleProfile(a, values)


#===============================================================================
# non-Brjuno subsequence :

class NonBrjunoSubsequence(object):
	"""
	Indices ``n_j`` with ``q_{n_(j+1)} >= H^q_{n_j}``, drawn from one parity
	class of the growth blocks, and the set ``J`` of positions ``j``
	(1-based) where ``||q_{n_j} alpha|| < exp(-q_{n_j} / j^2)``.
	"""
	def __init__(self, H, depth, indices, denominators, flags, parity,
	             blocks, block_sums, qualifying, bounds):
		self.H            = H
		self.depth        = depth
		self.indices      = indices
		self.denominators = denominators
		self.flags        = flags
		self.parity       = parity
		self.blocks       = blocks
		self.block_sums   = block_sums
		self.qualifying   = qualifying
		self.bounds       = bounds

	def __len__(self):
		return len(self.indices)

	def to_dict(self):
		"""
		:rtype: dict
		"""
		return {'H'            : self.H,
		        'depth'        : self.depth,
		        'indices'      : self.indices,
		        'denominators' : [str(q) for q in self.denominators],
		        'J'            : self.flags,
		        'parity'       : self.parity,
		        'blocks'       : [list(b) for b in self.blocks],
		        'block_sums'   : self.block_sums,
		        'I'            : self.qualifying,
		        'distance'     : self.bounds}


def nonbrjuno_subsequence(cf, H, max_terms):
	"""
	Extract the growth subsequence of the non-Brjuno rigidity argument.

	Block boundaries are ``m_1 = 0`` and ``m_{j+1}`` the first index with
	``q_{m_(j+1)} >= H^q_{m_j}``; only complete blocks ``[m_j, m_{j+1} - 1]``
	count.  Inside block ``j`` the index ``l_j`` maximizes
	``ln(q_{h+1}) / q_h``, and ``j`` qualifies when the block sum reaches
	``j^-1.5``.  The even family ``l_2, l_4, ...`` or the odd family
	``l_1, l_3, ...`` is returned, whichever holds more qualifying blocks,
	ties going to the even one.

	:param cf: the expansion
	:param H: growth base, greater than 1
	:param max_terms: largest number of indices returned
	:raises InsufficientDepth: if no block boundary fits within the depth
	:rtype: :class:`~arithmetic.NonBrjunoSubsequence`
	"""
	H = float(H)
	if H <= 1:
		raise InvalidParameter("H must exceed 1, not %g" % H)
	max_terms = int(max_terms)
	if max_terms <= 0:
		return NonBrjunoSubsequence(H, cf.depth, [], [], [], None, [], [], [],
		                            [])

	q = cf.denominators()
	with mpmath.workdps(30):
		lnH = mpmath.log(H)
		lnq = [_ln(x) for x in q]

		m = [0]
		while True:
			target = lnH * q[m[-1]]
			nxt    = None
			for n in range(m[-1] + 1, cf.depth + 1):
				if lnq[n] >= target:
					nxt = n
					break
			if nxt is None:
				break
			m.append(nxt)

		if len(m) < 2:
			raise InsufficientDepth("no block boundary q >= H^q_0 within depth "
			                        "%i" % cf.depth, produced=0, depth=cf.depth)

		terms  = [lnq[h+1] / q[h] for h in range(cf.depth)]
		blocks = [(m[j], m[j+1] - 1) for j in range(len(m) - 1)]
		sums   = []
		argmx  = []
		for b0, b1 in blocks:
			block = terms[b0:b1+1]
			sums.append(float(mpmath.fsum(block)))
			argmx.append(b0 + max(range(len(block)), key=lambda i: block[i]))

	qualifying = [j for j in range(1, len(blocks) + 1)
	              if sums[j-1] >= j**-1.5]
	n_even     = len([j for j in qualifying if j % 2 == 0])
	n_odd      = len(qualifying) - n_even
	parity     = 'even' if n_even >= n_odd else 'odd'
	first      = 2 if parity == 'even' else 1
	family     = list(range(first, len(blocks) + 1, 2))[:max_terms]
	indices    = [argmx[j-1] for j in family]

	flags  = []
	bounds = []
	for i, n in enumerate(indices, 1):
		mode = 'exact'
		dist = None
		if cf.alpha is not None:
			try:
				dist = distance_to_integers(cf.alpha, q[n])
			except PrecisionExhausted:
				dist = None
		with mpmath.workdps(30):
			if dist is None:
				mode    = 'upper-bound'
				log_d   = -lnq[n+1]
			else:
				log_d   = mpmath.log(dist)
			if log_d < -mpmath.mpf(q[n]) / i**2:
				flags.append(i)
		bounds.append({'j' : i, 'log_distance' : float(log_d), 'mode' : mode})

	s = "::: non-Brjuno subsequence : %i complete blocks, %s family, " \
	    "%i terms, J = %s :::" % (len(blocks), parity, len(indices), flags)
	print_text(s, cls=cf)
	return NonBrjunoSubsequence(H, cf.depth, indices, [q[n] for n in indices],
	                            flags, parity, blocks, sums, qualifying, bounds)
