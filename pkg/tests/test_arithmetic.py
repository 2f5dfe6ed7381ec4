import math
import mpmath
import pytest
from sympy import Rational

from clslvr.helper     import InvalidParameter, PrecisionExhausted, \
                              DepthExceeded, InsufficientDepth, ConfigError
from clslvr.arithmetic import IrrationalSpec, parse_irrational, \
                              ContinuedFraction, cf_expand, \
                              distance_to_integers, brjuno_partial_sum, \
                              brjuno_tail, brjuno_terms, classify, \
                              superliouville_profile, nonbrjuno_subsequence

GOLDEN = 'surd:1,-1,5,2'
SILVER = 'surd:1,-1,2,1'


def test_parse_spellings():
	assert parse_irrational(GOLDEN).kind == 'quadratic-surd'
	assert parse_irrational('liouville:3').to_string() == 'liouville:3'
	assert parse_irrational('series:1,3/9').data['tail'] == 9
	assert parse_irrational('series:1,3').data['tail'] == 6
	assert parse_irrational('dec:0.4142').kind == 'decimal-literal'
	assert parse_irrational('cf:1,2,3').data['quotients'] == [1, 2, 3]
	spec = parse_irrational(GOLDEN)
	assert parse_irrational(spec) is spec
	assert parse_irrational(spec.to_string()) == spec


@pytest.mark.parametrize('text', ['golden', 'surd:1,0,2,1', 'surd:1,0,4,3',
                                  'surd:1,2', 'liouville:0', 'liouville:10',
                                  'series:3,2', 'dec:1.5', 'cf:1,0',
                                  'cf:a', 'pi:3'])
def test_parse_rejects(text):
	with pytest.raises(InvalidParameter):
		parse_irrational(text)


def test_surd_quotients_are_periodic():
	assert cf_expand(GOLDEN, 12).partial_quotients == (1,)*12
	assert cf_expand(SILVER, 8).partial_quotients == (2,)*8
	# sqrt(3) - 1 = [0; 1, 2, 1, 2, ...]
	assert cf_expand('surd:1,-1,3,1', 6).partial_quotients == (1, 2)*3


def test_convergents_start_at_zero_over_one():
	cf = cf_expand(GOLDEN, 10)
	assert cf.convergents[0] == (0, 1)
	assert cf.denominators() == [1, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89]
	assert cf.p(3) == 2
	assert cf.q(10) == 89


def test_validate_exact_and_interval():
	assert all(cf_expand(GOLDEN, 20).validate().values())
	assert cf_expand(SILVER, 15).is_valid()
	cf = cf_expand('dec:0.41421356237309504880', 8)
	assert cf.partial_quotients == (2,)*8
	assert cf.is_valid()
	report = ContinuedFraction([3, 1, 4]).validate()
	assert sorted(report) == ['determinant', 'increasing', 'recurrence']


def test_precision_is_never_invented():
	with pytest.raises(PrecisionExhausted) as e:
		cf_expand('dec:0.4142', 40)
	assert e.value.details['depth'] == 40
	with pytest.raises(PrecisionExhausted):
		cf_expand('cf:1,2,3', 4)
	assert cf_expand('cf:1,2,3', 3).partial_quotients == (1, 2, 3)


def test_series_enclosure_contains_value():
	spec   = parse_irrational('liouville:3')
	lo, hi = spec.interval()
	assert lo == Rational(110001, 10**6)
	assert lo < hi
	assert float(spec.value()) == pytest.approx(0.110001, rel=1e-15)
	assert cf_expand(spec, 3).partial_quotients[0] == 9


def test_distance_to_integers():
	d = distance_to_integers(GOLDEN, 1)
	assert float(d) == pytest.approx((3 - math.sqrt(5))/2, rel=1e-15)
	# convergent denominators are best approximations :
	cf = cf_expand(GOLDEN, 30)
	for n in range(1, 29):
		q = cf.q(n)
		assert distance_to_integers(GOLDEN, q) < mpmath.mpf(1)/cf.q(n+1)
	with pytest.raises(InvalidParameter):
		distance_to_integers(GOLDEN, 0)
	with pytest.raises(PrecisionExhausted):
		distance_to_integers('dec:0.41', 10**6)


def test_brjuno_sums():
	cf    = cf_expand(GOLDEN, 20)
	terms = brjuno_terms(cf)
	assert terms[0] == 0.0
	assert terms[1] == pytest.approx(math.log(2))
	total = brjuno_partial_sum(cf, 19)
	assert total == pytest.approx(math.fsum(terms), rel=1e-14)
	assert brjuno_partial_sum(cf, 5) + brjuno_tail(cf, 5) \
	       == pytest.approx(total, rel=1e-14)
	with pytest.raises(DepthExceeded):
		brjuno_partial_sum(cf, 20)


def test_classify_labels():
	assert classify(cf_expand(GOLDEN, 30)).label == 'brjuno-consistent'
	assert classify(cf_expand('liouville:3', 3)).label \
	       == 'super-liouville-evidence'

	# ln(4) and ln(401)/4 both stay below 1.5 :
	c = classify(ContinuedFraction([4, 100, 1]), {'brjuno_divergence' : 2.0})
	assert c.label == 'non-brjuno-evidence'
	assert c.witness == [0, 1]
	assert c.max_index == 1


def test_classify_needs_depth():
	with pytest.raises(InsufficientDepth):
		classify(ContinuedFraction([1, 1]))
	with pytest.raises(ConfigError):
		classify(cf_expand(GOLDEN, 5), {'unknown' : 1.0})


def test_superliouville_profile():
	prof = superliouville_profile(cf_expand(GOLDEN, 12), 0.5)
	assert prof.values[0] == -math.inf
	assert len(prof.values) == 12
	assert prof.trend < 0
	with pytest.raises(InvalidParameter):
		superliouville_profile(cf_expand(GOLDEN, 12), 1.5)


def test_nonbrjuno_subsequence():
	# q = 1, 2, 5, 37, 158913789957, ...
	cf  = cf_expand('cf:2,2,7,4294967296,1,1', 6)
	sub = nonbrjuno_subsequence(cf, 2, 10)
	assert sub.blocks == [(0, 0), (1, 1), (2, 2), (3, 3)]
	assert sub.qualifying == [2, 3, 4]
	assert sub.parity == 'even'
	assert sub.indices == [1, 3]
	assert sub.denominators == [2, 37]
	assert sub.flags == [2]
	assert len(nonbrjuno_subsequence(cf, 2, 1)) == 1
	assert len(nonbrjuno_subsequence(cf, 2, 0)) == 0


def test_nonbrjuno_needs_a_block():
	with pytest.raises(InsufficientDepth):
		nonbrjuno_subsequence(ContinuedFraction([1]), 1000, 5)
	with pytest.raises(InvalidParameter):
		nonbrjuno_subsequence(ContinuedFraction([1, 1]), 1.0, 5)
