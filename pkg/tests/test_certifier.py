import json
import math
import numpy as np
import pytest
from numpy.testing import assert_allclose

from clslvr.helper      import InvalidParameter, ScheduleCheckFailed, \
                               StripConstructionFailed, DegreeZero, \
                               StageError, ConfigError
from clslvr.inputoutput import dumps
from clslvr.maps        import LinearSaddle, RigidRotation, StandardMap
from clslvr.cocycle     import TangentTriple, CocycleTrace, most_contracting, \
                               trace, refine_periodic_seeds, find_good_point
from clslvr.certifier   import Box, BoxSchedule, build_schedule, \
                               chart_constant, schedule_for, frame_map, \
                               ReturnMap, cone_step_check, return_map_check, \
                               concatenate_strips, unique_crossing, \
                               winding_number, square, cycle_spectrum, \
                               verify_hyperbolic_like, fixed_point_index, \
                               certify, verify_certificate, \
                               search_and_certify, HyperbolicityCertificate

LN16 = math.log(16)


@pytest.fixture
def steep():
	return LinearSaddle(16.0)


@pytest.fixture
def steep_trace(steep):
	return trace(steep, most_contracting(steep, [0.0, 0.0], 1), 1)


@pytest.fixture
def steep_schedule(steep_trace):
	return BoxSchedule(steep_trace, LN16, 16.0, 2, 0.0)


@pytest.fixture(scope='module')
def saddle_certificate():
	return search_and_certify(LinearSaddle(2.0), 8, 'auto')


def test_box():
	b = Box(1.0, 0.5, 0.25)
	assert list(b.contains(np.array([[1.0, 0.75], [1.0, 0.8], [1.1, 0.0]]))) \
	       == [True, False, False]
	assert b.grid(3).shape == (9, 2)
	assert np.all(b.contains(b.grid(5)))
	with pytest.raises(InvalidParameter):
		Box(1.0, 1.0, 1.5)


def test_schedule_identities(steep_schedule):
	s = steep_schedule
	assert s.geometry
	assert s.log_r_bar == pytest.approx(-6*LN16)
	assert s.log_c[1] == pytest.approx(0.99*LN16)
	assert s.margins['identities'] >= -1e-12
	assert s.box(0).r == pytest.approx(16.0**-6)
	assert s.box(0).kappa == pytest.approx(1/256.0)
	assert np.all(s.log_eps == -np.inf)
	# a single step of rate ln 16 does not reach c_L = 100 :
	assert 'c_L' in [f['check'] for f in s.failures]


def test_rotation_fails_schedule(rotation):
	tr = trace(rotation, TangentTriple.orthonormal([0.5, 0.0], [1.0, 0.0]), 10)
	with pytest.raises(ScheduleCheckFailed) as e:
		build_schedule(tr, 0.1, 2.0, 4, 0.0)
	checks = [f['check'] for f in e.value.failures]
	assert 'c_L' in checks
	assert 'tau_L' in checks
	assert e.value.schedule.L == 10


def test_schedule_below_geometry_floor(steep_trace):
	s = BoxSchedule(steep_trace, LN16, 16.0, 40, 0.0)
	assert not s.geometry
	assert s.box(0) is None
	with pytest.raises(StripConstructionFailed) as e:
		concatenate_strips(LinearSaddle(16.0), steep_trace, s)
	assert e.value.details['stage'] == 'geometry'


def test_chart_constant_vanishes_for_linear_maps(steep_trace):
	assert chart_constant(steep_trace, 0.0, 16.0) == 0.0
	assert chart_constant(steep_trace, 1.0, 16.0) == pytest.approx(1/16.0)


def test_cone_step_analytic_and_sampled(steep, steep_trace, steep_schedule):
	a = cone_step_check(steep, steep_trace, steep_schedule, 0)
	assert a.margins['kappa'] == pytest.approx(2*LN16 - 0.99*LN16)
	assert a.margins['tau'] == pytest.approx(LN16/100)
	b = cone_step_check(steep, steep_trace, steep_schedule, 0, 'sampled')
	assert b.margins['sampled_forward'] > 0
	assert b.margins['sampled_backward'] > 0
	with pytest.raises(InvalidParameter):
		cone_step_check(steep, steep_trace, steep_schedule, 1)
	with pytest.raises(InvalidParameter):
		cone_step_check(steep, steep_trace, steep_schedule, 0, 'rigorous')


def test_frame_map_round_trip(standard):
	tr = trace(standard, TangentTriple.orthonormal([1.0, 0.5], [1.0, 2.0]), 3)
	f  = frame_map(tr, 2, standard.domain)
	p  = np.array([[1e-3, -2e-3], [0.0, 0.0]])
	assert_allclose(f.chart(f.embed(p)), p, atol=1e-13)
	assert f.condition() >= 1.0
	with pytest.raises(InvalidParameter):
		frame_map(tr, 4)


def test_return_map_of_saddle(steep, steep_trace, steep_schedule):
	ret    = ReturnMap(steep, steep_trace)
	assert_allclose(ret.G(np.array([1e-9, 1e-9])), [16e-9, 1e-9/16], rtol=1e-12)
	assert_allclose(ret.DI(), np.identity(2))
	report = return_map_check(steep, steep_trace, steep_schedule, ret=ret)
	assert report.deviation_c1 == 0.0
	assert report.margins['cone'] == pytest.approx(math.log(50))


def test_strips_and_hyperbolic_fixed_point(steep, steep_trace, steep_schedule):
	ret    = ReturnMap(steep, steep_trace)
	strips = concatenate_strips(steep, steep_trace, steep_schedule, ret=ret)
	r      = steep_schedule.box(0).r
	assert_allclose(sorted(g[0,0] for g in strips.r1.graphs), [-r/16, r/16],
	                rtol=1e-12)
	assert strips.crossings.shape == (4, 2)
	assert strips.margins['composed_cone'] > 0

	hyp = verify_hyperbolic_like(steep, ret, strips)
	assert abs(hyp.degree) == 1
	assert_allclose(hyp.fixed_point, [0.0, 0.0], atol=1e-12)
	assert_allclose(hyp.spectrum.eigenvalues, [16.0, 1/16.0], rtol=1e-12)


def test_strips_fail_for_weak_expansion(saddle):
	tr = trace(saddle, most_contracting(saddle, [0.0, 0.0], 1), 1)
	s  = BoxSchedule(tr, math.log(2), 2.0, 4, 0.0)
	with pytest.raises(StripConstructionFailed) as e:
		concatenate_strips(saddle, tr, s)
	assert e.value.details['stage'] == 'horizontal'


def test_unique_crossing():
	v = np.array([[0.0, -1.0], [0.0, 1.0]])
	h = np.array([[-1.0, 0.2], [1.0, 0.2]])
	assert_allclose(unique_crossing(v, h), [0.0, 0.2])
	zig = np.array([[-1.0, 0.0], [1.0, 0.0], [-1.0, 0.5]])
	with pytest.raises(StripConstructionFailed):
		unique_crossing(v, zig)


def test_winding_number():
	poly = square(1.0)
	assert winding_number(lambda p : p, poly) == 1
	assert winding_number(lambda p : p*[1.0, -1.0], poly) == -1
	assert winding_number(lambda p : np.tile([1.0, 0.0], (len(p), 1)), poly) \
	       == 0
	# z -> z^2 turns twice :
	sq = lambda p : np.stack([p[:,0]**2 - p[:,1]**2, 2*p[:,0]*p[:,1]], axis=-1)
	assert winding_number(sq, poly) == 2
	with pytest.raises(DegreeZero):
		winding_number(lambda p : 0*p, poly)


def test_cycle_spectrum(saddle, rotation):
	sp = cycle_spectrum(saddle, [0.0, 0.0], 3)
	assert sp.is_hyperbolic()
	assert_allclose(sp.eigenvalues, [8.0, 0.125], rtol=1e-13)
	assert sp.product() == pytest.approx(1.0)
	rot = cycle_spectrum(rotation, [0.5, 0.0], 1)
	assert not rot.real
	assert not rot.is_hyperbolic()


def test_fixed_point_index_of_saddle(saddle):
	assert fixed_point_index(saddle, [0.0, 0.0], 1) == -1


def test_saddle_certificate_is_geometric(saddle_certificate):
	cert = saddle_certificate
	assert isinstance(cert, HyperbolicityCertificate)
	assert cert.regime == 'geometric'
	assert cert.period == 7
	assert cert.schedule.M == 6
	assert abs(cert.degree) == 1
	assert_allclose(cert.fixed_point, [0.0, 0.0], atol=1e-12)
	assert_allclose(cert.eigenvalues, [128.0, 1/128.0], rtol=1e-12)
	assert len(cert.diagnostic_rows()) == 7
	assert all(v >= -1e-9 for k, v in cert.cone_margins().items()
	           if v is not None and not k.endswith('crossing')
	           and k != 'hyperbolic_degree_sign')


def test_certificate_verifies_from_json(saddle_certificate):
	d = json.loads(dumps(saddle_certificate))
	assert d['schema'] == HyperbolicityCertificate.SCHEMA
	assert verify_certificate(None, d)['ok']
	assert verify_certificate(LinearSaddle(2.0), saddle_certificate)['ok']

	d['degree'] = -d['degree']
	report = verify_certificate(None, d)
	assert not report['degree_ok']
	assert not report['ok']

	d['schema'] = 'clslvr-goodpoint/1'
	with pytest.raises(InvalidParameter):
		verify_certificate(None, d)


@pytest.fixture(scope='module')
def standard_certificate():
	standard = StandardMap(6.0)
	seeds    = refine_periodic_seeds(standard, [[0.01, 0.01]], max_period=1)
	gp       = find_good_point(standard, seeds, 400, 'auto',
	                           match_radius=1e-13, min_return='auto')
	return certify(standard, gp)


def test_standard_map_certificate_below_geometry_floor(standard_certificate):
	cert = standard_certificate
	assert cert.regime == 'schedule-only'
	assert cert.strips is None
	assert cert.period == 3
	assert abs(cert.degree) == 1
	assert cert.spectrum.is_hyperbolic()
	assert verify_certificate(None, json.loads(dumps(cert)))['ok']


def test_rotation_stops_at_goodpoint_stage(rotation):
	with pytest.raises(StageError) as e:
		search_and_certify(rotation, 50, 0.1, {'seeds' : 4})
	assert e.value.stage == 'goodpoint'


def test_certify_rejects_unknown_parameters(saddle):
	gp = find_good_point(saddle, [[0.0, 0.0]], 8, 'auto', match_radius=1e-13,
	                     min_return='auto')
	with pytest.raises(ConfigError):
		certify(saddle, gp, {'M' : 6, 'rounding' : 'directed'})
	with pytest.raises(StageError) as e:
		certify(saddle, gp, {'M' : 4})
	assert e.value.stage == 'schedule'


def test_standard_map_fixed_point_accuracy(standard_certificate):
	cert = standard_certificate
	assert cert.good_point.refined
	assert cert.residual < 1e-9
	assert abs(cert.spectrum.product() - 1.0) < 1e-6
	assert verify_certificate(StandardMap(6.0), cert)['ok']


def test_standard_map_cone_steps_sampled(standard, standard_certificate):
	cert = standard_certificate
	tr   = cert.good_point.trace
	for n in range(cert.period):
		a = cone_step_check(standard, tr, cert.schedule, n)
		b = cone_step_check(standard, tr, cert.schedule, n, 'sampled')
		for name in ('kappa', 'tau', 'kappa_tilde'):
			assert b.margins[name] == pytest.approx(a.margins[name])
		assert b.margins['sampled_forward'] > 0
		assert b.margins['sampled_backward'] > 0


def test_plain_fixed_point_orbit_certifies(standard):
	# (0, 0) is fixed exactly, so its plain orbit returns without refinement
	gp   = find_good_point(standard, [[0.0, 0.0]], 400, 'auto',
	                       match_radius=1e-13, min_return='auto')
	assert not gp.refined
	assert gp.period is None
	cert = certify(standard, gp)
	assert cert.period == 3
	assert abs(cert.degree) == 1
	assert cert.spectrum.is_hyperbolic()


def test_schedule_at_large_M(saddle):
	tr = trace(saddle, most_contracting(saddle, [0.0, 0.0], 7), 7)
	s  = BoxSchedule(tr, math.log(2), 2.0, 1000, 0.0)
	L  = s.L
	assert L == 7
	assert not s.geometry
	assert s.failures == []
	assert s.log_r_bar == pytest.approx(-3000*math.log(2))
	assert_allclose(s.log_kappa + s.log_kappa_tilde, 2*s.log_kappa_bar,
	                atol=1e-9)
	assert_allclose(s.log_beta + s.log_c, s.log_beta_bar, atol=1e-9)
	assert s.log_c[L] == pytest.approx(math.log(100), abs=1e-9)
	assert s.log_r[L] == pytest.approx(s.log_r_bar + 6*math.log(10), abs=1e-9)
	assert s.log_kappa[L] == pytest.approx(s.log_kappa_bar - math.log(100),
	                                       abs=1e-9)
	assert s.log_kappa_tilde[L] == \
	       pytest.approx(s.log_kappa_bar + math.log(100), abs=1e-9)


def test_beta_margin_includes_return_point():
	# frames orthogonal at x_0 and nearly parallel at the return point
	t  = 1e-6
	tr = CocycleTrace(np.zeros((2, 2)), [[0.0, 1.0], [math.cos(t), math.sin(t)]],
	                  [[1.0, 0.0], [1.0, 0.0]], [-1.0], [1.0])
	s  = BoxSchedule(tr, 1.0, 2.0, 1, 0.0)
	assert len(s.margins['beta']) == s.L + 1
	assert {'check' : 'beta', 'index' : 1} in \
	       [{'check' : f['check'], 'index' : f['index']} for f in s.failures]
	assert s.margins['beta'][0] > 0
