import math
import numpy as np
import pytest
from numpy.testing import assert_allclose

from clslvr.helper import DomainEscape, UnknownMap, InvalidParameter, det2
from clslvr.maps   import Disk, Annulus, PlaneChart, RigidRotation, \
                          PolarTwist, StandardMap, LinearSaddle, \
                          PerturbedTwist, ComposedMap, builtin, \
                          builtin_names, map_from_dict, Orbit, iterate, \
                          iterate_many, derivative_growth, lyapunov_qr, \
                          newton_periodic


def test_disk_grid_reaches_boundary():
	d = Disk(2.0)
	g = d.grid(4)
	assert g.shape == (17, 2)
	assert_allclose(g[0], [0.0, 0.0])
	assert_allclose(np.max(np.linalg.norm(g, axis=1)), 2.0)
	assert np.all(d.contains(g))
	assert d.area() == pytest.approx(4*math.pi)


def test_torus_chart_wraps_differences():
	a = Annulus(-math.pi, math.pi, periodic=True)
	d = a.difference([0.1, math.pi - 0.1], [2*math.pi - 0.1, -math.pi + 0.1])
	assert_allclose(d, [0.2, -0.2], atol=1e-14)
	w = a.wrap([7.0, 4.0])
	assert 0 <= w[0] < 2*math.pi
	assert -math.pi <= w[1] < math.pi


def test_halton_points_are_inside():
	for domain in (Disk(), Annulus(-1, 1), PlaneChart(0, 1, 0, 2)):
		pts = domain.halton(32, shrink=0.9)
		assert pts.shape == (32, 2)
		assert np.all(domain.contains(pts))


def test_empty_domains_are_rejected():
	with pytest.raises(InvalidParameter):
		Disk(0.0)
	with pytest.raises(InvalidParameter):
		Annulus(1.0, 1.0)
	with pytest.raises(InvalidParameter):
		PlaneChart(0, 1, 2, 2)


@pytest.mark.parametrize('map', [RigidRotation(0.3), PolarTwist(0.1, 0.2),
                                 StandardMap(6.0), LinearSaddle(3.0),
                                 PerturbedTwist(twist=0.5),
                                 PerturbedTwist(coefficients=[[2, 0.5, 0.0]])])
def test_catalog_maps_are_area_preserving(map):
	report = map.verify(samples=2000)
	assert report['ok'], report


@pytest.mark.parametrize('map', [PolarTwist(0.1, 0.2), StandardMap(6.0),
                                 PerturbedTwist(twist=0.5)])
def test_scalar_step_matches_eval(map):
	pts = map.domain.halton(20, shrink=0.8)
	for x in pts:
		y = map.eval(x)
		z = map.step(*x)
		assert_allclose(map.domain.difference(np.array(z), y), [0, 0],
		                atol=1e-12)


def test_standard_map_bounds():
	m = StandardMap(6.0)
	F = 2*36 + 12 + 3
	assert m.d1_bound == pytest.approx(math.sqrt((F + math.sqrt(F*F - 4))/2))
	assert m.d2_bound == pytest.approx(6*math.sqrt(2))
	# worst case of the Jacobian norm is attained at cos(theta) = 1 :
	J = m.jacobian(np.array([0.0, 0.0]))
	assert np.linalg.norm(J, 2) <= m.d1_bound*(1 + 1e-12)


def test_composed_map():
	g = ComposedMap(LinearSaddle(2.0), 3)
	assert_allclose(g.eval([1.0, 1.0]), [8.0, 0.125])
	assert_allclose(g.jacobian(np.zeros(2)), np.diag([8.0, 0.125]))
	assert g.d1_bound == 8.0
	assert g.d2_bound == 0.0
	r = ComposedMap(RigidRotation(0.1), 4)
	assert_allclose(r.turns(np.array([0.5, 0.0])), 0.4)
	with pytest.raises(InvalidParameter):
		ComposedMap(r, 0)


def test_catalog():
	assert builtin_names() == ['linear-saddle', 'perturbed-twist',
	                           'polar-twist', 'rigid-rotation', 'standard-map']
	m = builtin('standard-map', {'k' : 6})
	assert m.k == 6.0
	with pytest.raises(UnknownMap):
		builtin('henon')
	with pytest.raises(InvalidParameter):
		builtin('standard-map', {'mu' : 1.0})
	with pytest.raises(InvalidParameter):
		builtin('linear-saddle', {'mu' : 0.0})
	with pytest.raises(InvalidParameter):
		builtin('rigid-rotation', {'eps' : 'tenth'})


def test_map_from_dict():
	g = map_from_dict(ComposedMap(StandardMap(6.0), 2).to_dict())
	assert isinstance(g, ComposedMap)
	assert g.m == 2
	assert g.base.k == 6.0
	h = map_from_dict(PerturbedTwist(coefficients=[[1, 0.1, 0.2]]).to_dict())
	assert h.parameters['coefficients'] == [[1, 0.1, 0.2]]


def test_iterate_reports_escape():
	m = LinearSaddle(2.0)
	o = iterate(m, [1.0, 1.0], 10)
	assert o.length == 10
	assert o.jacobians.shape == (10, 2, 2)
	assert_allclose(o.points[-1], [1024.0, 1.0/1024])
	assert o.step_error() == 0.0
	with pytest.raises(DomainEscape) as e:
		iterate(m, [1.0, 1.0], 30)
	assert e.value.index == 20
	with pytest.raises(DomainEscape) as e:
		iterate(RigidRotation(), [2.0, 0.0], 3)
	assert e.value.index == 0


def test_iterate_many_freezes_escaped_seeds():
	pts, escaped = iterate_many(LinearSaddle(2.0), [[1.0, 0.0], [0.0, 1.0]], 25)
	assert pts.shape == (26, 2, 2)
	assert list(escaped) == [20, -1]
	assert_allclose(pts[-1, 0], pts[19, 0])


def test_periodic_orbit_tiles_cycle():
	o = Orbit.periodic(LinearSaddle(2.0), [0.0, 0.0], 1, 5)
	assert o.points.shape == (6, 2)
	assert o.jacobians.shape == (5, 2, 2)
	assert o.residual == 0.0
	assert o.period == 1


def test_derivative_growth():
	r = derivative_growth(LinearSaddle(2.0), [1, 5, 40],
	                      sample_grid=[[0.0, 0.0], [0.0, 1.0]])
	assert_allclose(r.log_norms, [math.log(2), 5*math.log(2), 40*math.log(2)],
	                rtol=1e-12)
	rows = r.rows()
	assert rows[2]['rate'] == pytest.approx(math.log(2))
	assert rows[0]['bound'] == 'lower'

	s = derivative_growth(RigidRotation(0.1), [10, 100], sample_grid=6)
	assert_allclose(s.log_norms, [0.0, 0.0], atol=1e-12)

	with pytest.raises(InvalidParameter):
		derivative_growth(RigidRotation(0.1), [3, 2])


def test_growth_is_thread_independent():
	m = StandardMap(1.2)
	a = derivative_growth(m, [5, 20], sample_grid=24, threads=1)
	b = derivative_growth(m, [5, 20], sample_grid=24, threads=4)
	assert a.log_norms == b.log_norms
	assert a.argmax == b.argmax


def test_lyapunov_exponents_of_saddle():
	assert_allclose(lyapunov_qr(LinearSaddle(2.0), [0.0, 0.0], 10),
	                [math.log(2), -math.log(2)], atol=1e-14)


def test_newton_finds_standard_map_fixed_point():
	m          = StandardMap(6.0)
	z, res, it = newton_periodic(m, [0.01, 0.01], 1)
	assert res < 1e-10
	assert m.domain.distance(z, [0.0, 0.0]) < 1e-9
	assert abs(det2(m.jacobian(z)) - 1) < 1e-12
