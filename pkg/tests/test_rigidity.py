import math
import numpy as np
import pytest

from clslvr.helper    import InvalidParameter
from clslvr.maps      import RigidRotation, PolarTwist, LinearSaddle, GOLDEN
from clslvr.rigidity  import rotation_number, pseudo_rotation_gate, \
                             ball_diameters, displacement_bound, \
                             free_disc_search, first_return, \
                             kac_return_stats, holder_bound_log, \
                             holder_rigidity_check, \
                             nonbrjuno_rigidity_check, growth_gap_scan


def test_rotation_number_of_rigid_rotation(rotation):
	est = rotation_number(rotation, [[0.5, 0.0], [0.0, 0.9]], 500)
	assert est.value == pytest.approx(0.1, abs=1e-12)
	assert est.spread == pytest.approx(0.0, abs=1e-12)
	assert est.summary()['seeds'] == 2
	assert [r['seed_index'] for r in est.rows()] == [0, 1]


def test_rotation_number_of_twist_depends_on_radius(twist):
	# the twist keeps |z|, so every seed turns by rho0 + rho1 |z|^2
	est = rotation_number(twist, [[0.5, 0.0], [0.0, 1.0]], 200)
	assert est.per_seed == pytest.approx([0.15, 0.3])
	assert est.value == pytest.approx(0.225)
	assert est.spread == pytest.approx(0.15)


def test_rotation_number_rejects(rotation, saddle):
	with pytest.raises(InvalidParameter):
		rotation_number(saddle, [[1.0, 1.0]], 10)
	with pytest.raises(InvalidParameter):
		rotation_number(rotation, [[0.0, 0.0]], 10)
	with pytest.raises(InvalidParameter):
		rotation_number(rotation, [[0.5, 0.0]], 0)


def test_pseudo_rotation_gate(rotation, twist, saddle):
	gate = pseudo_rotation_gate(rotation)
	assert gate['passed']
	assert gate['seeds'] == 16
	assert gate['value'] == pytest.approx(0.1, abs=1e-12)
	assert not pseudo_rotation_gate(twist)['passed']
	gate = pseudo_rotation_gate(saddle)
	assert not gate['passed']
	assert gate['reason'] == 'no angular coordinate'
	small = pseudo_rotation_gate(rotation, {'gate_seeds' : 4,
	                                        'gate_iterations' : 10})
	assert small['seeds'] == 4 and small['iterations'] == 10


def test_ball_diameters_of_rotation(rotation):
	X = np.array([[0.0, 0.0], [0.1, 0.2]])
	d = ball_diameters(rotation, X, 0.25)
	assert d == pytest.approx([0.5, 0.5])


def test_displacement_bound_for_rotation(rotation):
	rep = displacement_bound(rotation, 0.1, grid=8)
	s   = math.sqrt(0.1)
	assert rep['lhs'] == pytest.approx(2*math.sin(0.1*math.pi), rel=1e-9)
	assert rep['rhs'] == pytest.approx(3*s, rel=1e-9)
	assert rep['holds'] and rep['asserted']
	assert rep['grid_points'] == 65
	assert len(rep.rows()) == 65
	assert rep.summary()['operation'] == 'displacement'
	with pytest.raises(InvalidParameter):
		displacement_bound(rotation, 0.3)


def test_free_disc_of_rotation():
	f   = RigidRotation(0.3)
	rep = free_disc_search(f, 0.3, 512, 20, rng_seed=7)
	# the best free disc of a rotation by 2 pi eps has radius
	# sin(pi eps) / (1 + sin(pi eps))
	best = math.sin(0.3*math.pi) / (1 + math.sin(0.3*math.pi))
	assert 0.3 < rep['radius'] <= best*(1 + 1e-3)
	assert rep['area'] <= rep['bound']
	assert rep['holds'] and rep['asserted']
	assert rep['first_return'] is not None and rep['first_return'] >= 2
	assert rep.summary()['seed'] == 7


def test_free_disc_is_deterministic():
	f  = RigidRotation(0.3)
	p  = {'chunk' : 64}
	r1 = free_disc_search(f, 0.3, 200, 10, 3, p, threads=1)
	r2 = free_disc_search(f, 0.3, 200, 10, 3, p, threads=4)
	assert [r['trial'] for r in r1.rows()] == [r['trial'] for r in r2.rows()]
	assert [r['radius'] for r in r1.rows()] == \
	       [r['radius'] for r in r2.rows()]
	assert r1['radius'] == r2['radius']
	assert r1['trial'] == r2['trial']


def test_identity_has_no_free_disc():
	rep = free_disc_search(RigidRotation(0.0), 0.1, 64, 5, 0)
	assert rep['radius'] == 0.0
	assert rep['center'] is None
	assert rep['area'] == 0.0
	assert rep['first_return'] is None


def test_free_disc_rejects(rotation):
	with pytest.raises(InvalidParameter):
		free_disc_search(rotation, 0.1, 0, 5, 0)
	with pytest.raises(InvalidParameter):
		free_disc_search(rotation, 0.1, 5, 0, 0)


def test_first_return_of_rotation():
	f = RigidRotation(0.2)
	assert first_return(f, [0.5, 0.0], 0.1, 10) == 5
	assert first_return(f, [0.5, 0.0], 0.1, 4) is None


def test_kac_statistics_of_rational_rotation():
	f   = RigidRotation(0.2)
	rep = kac_return_stats(f, ([0.5, 0.0], 0.1), 200, 10, rng_seed=1)
	assert rep['mean_return'] == pytest.approx(5.0)
	assert rep['capped_fraction'] == 0.0
	assert rep['ratio'] == pytest.approx(0.2)
	assert rep['area'] == pytest.approx(0.01)
	assert rep['kac_product'] == pytest.approx(0.05)
	assert rep['kac_holds']
	assert rep['rotation_number'] == pytest.approx(0.2, abs=1e-12)
	assert rep.rows() == [{'return_time' : 5, 'count' : 200, 'seed' : 1}]


def test_kac_caps_and_rejects(rotation):
	rep = kac_return_stats(RigidRotation(0.2), ([0.5, 0.0], 0.1), 50, 3, 0)
	assert rep['capped_fraction'] == 1.0
	assert rep['mean_return'] is None
	assert rep['kac_holds']
	with pytest.raises(InvalidParameter):
		kac_return_stats(rotation, ([0.95, 0.0], 0.1), 10, 5, 0)


def test_holder_bound_log():
	# q = 1, q_next = 4, a = C = 1 : 1/2 + 2/2
	assert holder_bound_log(1, 4, 1.0, 1.0) == pytest.approx(math.log(1.5))
	# huge q does not overflow
	assert np.isfinite(holder_bound_log(10**6, 10**7, 0.5, 2.0))


def test_holder_check_for_golden_rotation(golden_rotation):
	rep  = holder_rigidity_check(golden_rotation, 'surd:1,-1,5,2', 1.0, 1.0,
	                             [8, 10, 12], grid=8, max_iterations=100)
	rows = rep.rows()
	assert [r['q'] for r in rows] == [34, 89, 233]
	assert [r['skipped'] for r in rows] == [False, False, True]
	assert rows[0]['measured'] == pytest.approx(
	       2*math.sin(math.pi*abs(34*GOLDEN - 21)), rel=1e-6)
	assert all(r['holds'] for r in rows[:2])
	assert rep['measured_rows'] == 2
	assert rep['alpha'] == 'surd:1,-1,5,2'
	assert len(rep['profile']['values']) == 13
	with pytest.raises(InvalidParameter):
		holder_rigidity_check(golden_rotation, 'surd:1,-1,5,2', 1.5, 1.0, [3])


def test_nonbrjuno_check_on_rotation(rotation):
	rep  = nonbrjuno_rigidity_check(rotation, 'cf:2,2,7,4294967296,1,1', 2,
	                                10, depth=6, grid=6)
	rows = rep.rows()
	assert [r['q'] for r in rows] == [2, 37]
	assert [r['in_J'] for r in rows] == [False, True]
	assert all(r['label'] == 'measured' for r in rows)
	assert all(r['growth'] == pytest.approx(0.0, abs=1e-12) for r in rows)
	assert all(r['growth_ok'] for r in rows)
	assert rep['measured_rows'] == 2 and rep['extrapolated_rows'] == 0

	rep = nonbrjuno_rigidity_check(rotation, 'cf:2,2,7,4294967296,1,1', 2,
	                               10, depth=6, grid=6, max_iterations=10)
	assert [r['label'] for r in rep.rows()] == ['measured', 'extrapolated']


def test_growth_gap_without_hit(rotation):
	rep = growth_gap_scan(rotation, [8, 256], 0.5, 2, grid=6,
	                      max_iterations=100)
	assert rep['hit'] is None
	assert rep['outcome'] is None
	assert rep['truncated']
	assert len(rep.rows()) == 1
	assert rep.rows()[0]['rate'] == pytest.approx(0.0, abs=1e-12)


def test_growth_gap_sequence_violations(rotation):
	rep = growth_gap_scan(rotation, [1, 3], 0.5, 2, grid=4)
	assert rep['violations'] == [1]
	with pytest.raises(InvalidParameter) as e:
		growth_gap_scan(rotation, [1, 3], 0.5, 2, strict=True, grid=4)
	assert e.value.details['violations'] == [1]


def test_growth_gap_hands_over_to_certifier():
	# rate ln 2 > theta at the first index, so g = f and q = q_1
	rep = growth_gap_scan(LinearSaddle(2.0), [8, 256], 0.5, 2,
	                      grid=[[0.0, 0.0], [0.0, 1.0]])
	assert rep['hit'] == 1
	assert rep.rows()[0]['rate'] == pytest.approx(math.log(2.0))
	assert rep['outcome']['certified']
	assert rep['outcome']['certificate']['period'] == 7
