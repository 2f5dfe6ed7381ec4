import math
import numpy as np
import pytest
from numpy.testing import assert_allclose

from clslvr.helper import ClslvrError, InvalidParameter, StageError, \
                          NotFound, DomainEscape, ConfigError, \
                          ScheduleCheckFailed, perp, det2, inv2, \
                          singular_values2, norm2, top_singular_vectors, \
                          cot_angle, vector_angle, wrap_angle, \
                          accumulate_product, log_add, log_sub, log1p_exp, \
                          merge_params, default_threads, parallel_map, chunks


def test_error_banner_and_details():
	e = InvalidParameter("bad value", value=3)
	assert str(e) == ">>> bad value <<<"
	assert e.to_dict() == {'error' : 'InvalidParameter',
	                       'message' : 'bad value', 'value' : 3}
	assert isinstance(e, ClslvrError)


def test_stage_error_wraps_cause():
	e = StageError('cones', InvalidParameter("margin negative"))
	assert e.stage == 'cones'
	assert e.details['cause']['error'] == 'InvalidParameter'
	assert 'margin negative' in e.message

	f = StageError('io', ValueError("oops"))
	assert f.details['cause'] == {'error' : 'ValueError', 'message' : 'oops'}


def test_schedule_failure_lists_checks():
	e = ScheduleCheckFailed([{'check' : 'tau_L', 'index' : None,
	                          'margin' : -1.0}], schedule=None)
	assert 'tau_L' in e.message
	assert e.schedule is None


def test_not_found_is_falsy():
	nf = NotFound("nothing", {'seeds' : 4})
	assert not nf
	assert nf.to_dict() == {'found' : False, 'reason' : 'nothing',
	                        'statistics' : {'seeds' : 4}}


def test_domain_escape_records_point():
	e = DomainEscape(7, np.array([1.5, -2.0]))
	assert e.index == 7
	assert e.point == [1.5, -2.0]
	assert e.to_dict()['index'] == 7


def test_perp_and_det():
	assert_allclose(perp([1.0, 0.0]), [0.0, 1.0])
	m = np.array([[2.0, 1.0], [1.0, 1.0]])
	assert det2(m) == 1.0
	assert_allclose(np.dot(inv2(m), m), np.identity(2), atol=1e-15)


def test_singular_values_keep_small_one_accurate():
	m      = np.array([[1e8, 0.0], [0.0, 1e-8]])
	s1, s2 = singular_values2(m)
	assert_allclose([s1, s2], [1e8, 1e-8], rtol=1e-14)
	assert norm2(np.array([[0.0, 3.0], [0.0, 0.0]])) == 3.0


def test_top_singular_vectors_are_aligned():
	m    = np.array([[1.0, 2.0], [3.0, 4.0]])
	v, u = top_singular_vectors(m)
	img  = np.dot(m, v)
	assert_allclose(img / np.linalg.norm(img), u, atol=1e-14)
	assert_allclose(np.linalg.norm(img), np.linalg.svd(m)[1][0], rtol=1e-13)


def test_angles():
	assert cot_angle([1.0, 0.0], [0.0, 1.0]) == 0.0
	assert cot_angle([1.0, 0.0], [2.0, 0.0]) == np.inf
	assert_allclose(cot_angle([1.0, 0.0], [1.0, 1.0]), 1.0)
	assert_allclose(vector_angle([1.0, 0.0], [-1.0, 0.0]), math.pi)
	assert wrap_angle(-math.pi) == math.pi
	assert_allclose(wrap_angle(3*math.pi/2), -math.pi/2)


def test_accumulate_product_does_not_overflow():
	J               = np.tile(np.diag([2.0, 0.5]), (2000, 1, 1))
	P, log_s, log_d = accumulate_product(J)
	assert_allclose(log_s, 2000*math.log(2), rtol=1e-13)
	assert_allclose(log_d, 0.0, atol=1e-12)
	assert_allclose(np.sum(P**2), 1.0)
	assert abs(P[0,0]) == pytest.approx(1.0)


def test_log_domain():
	assert_allclose(log_add(0.0, 0.0), math.log(2))
	assert log_add(1000.0, 1000.0) == pytest.approx(1000 + math.log(2))
	assert_allclose(log_sub(math.log(3), math.log(2)), 0.0, atol=1e-15)
	assert log_sub(1.0, 1.0) == -np.inf
	assert math.isnan(log_sub(0.0, 1.0))
	assert log_sub(2.0, -np.inf) == 2.0
	assert log1p_exp(800.0) == pytest.approx(800.0)
	assert_allclose(log1p_exp(0.0), math.log(2))


def test_merge_params():
	d = {'a' : 1, 'b' : 2}
	assert merge_params(d, None) == d
	assert merge_params(d, {'b' : 3}) == {'a' : 1, 'b' : 3}
	assert d['b'] == 2
	with pytest.raises(ConfigError):
		merge_params(d, {'c' : 1})
	with pytest.raises(ConfigError):
		merge_params(d, [('a', 1)])


def test_default_threads(monkeypatch):
	monkeypatch.delenv('CLSLVR_THREADS', raising=False)
	assert default_threads() == 1
	monkeypatch.setenv('CLSLVR_THREADS', '6')
	assert default_threads() == 6
	monkeypatch.setenv('CLSLVR_THREADS', 'many')
	with pytest.raises(ConfigError):
		default_threads()


def test_parallel_map_keeps_order():
	out = parallel_map(lambda x : x*x, range(50), threads=4)
	assert out == [x*x for x in range(50)]


def test_chunks():
	assert chunks(10, 4) == [(0, 0, 4), (1, 4, 8), (2, 8, 10)]
	assert chunks(0, 4) == []
