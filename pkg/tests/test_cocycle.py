import json
import math
import numpy as np
import pytest
from numpy.testing import assert_allclose

from clslvr.helper      import InvalidTriple, DegenerateSpectrum, \
                               PreconditionViolated, \
                               BoundViolated, InvalidParameter, ConfigError, \
                               NotFound
from clslvr.inputoutput import dumps
from clslvr.maps        import LinearSaddle, RigidRotation, StandardMap, \
                               iterate
from clslvr.cocycle     import TangentTriple, CocycleTrace, most_contracting, \
                               trace, pliss_indices, check_good_triple, \
                               consequence_thresholds, good_consequences, \
                               cot_recursion_bound, good_index_bruteforce, \
                               _good_index_scan, good_in_orbit, \
                               refine_periodic_seeds, auto_min_return, \
                               find_good_point, goodpoint_search, \
                               GoodPointCertificate, verify_goodpoint, \
                               SLACK, _cells, _neighbor_keys

LN2 = math.log(2)


@pytest.fixture
def saddle_trace(saddle):
	triple = most_contracting(saddle, [0.0, 0.0], 5)
	return trace(saddle, triple, 5)


def test_triple_rejects_bad_frames():
	with pytest.raises(InvalidTriple):
		TangentTriple([0, 0], [2.0, 0.0], [0.0, 1.0])
	with pytest.raises(InvalidTriple):
		TangentTriple([0, 0], [1.0, 0.0], [-1.0, 0.0])
	t = TangentTriple.orthonormal([0, 0], [3.0, 4.0])
	assert_allclose(t.v_s, [0.6, 0.8])
	assert_allclose(t.v_u, [-0.8, 0.6])


def test_most_contracting_direction_of_saddle(saddle):
	t = most_contracting(saddle, [0.0, 0.0], 5)
	assert not t.degenerate
	assert abs(t.v_s[1]) == pytest.approx(1.0)
	assert t.anchor['log_sigma_max'] == pytest.approx(5*LN2)
	assert t.anchor['log_sigma_min'] == pytest.approx(-5*LN2)


def test_degenerate_spectrum_is_flagged(rotation):
	t = most_contracting(rotation, [0.5, 0.0], 10)
	assert t.degenerate
	assert_allclose(t.v_s, [0.0, 1.0])
	with pytest.raises(DegenerateSpectrum):
		most_contracting(rotation, [0.5, 0.0], 10, strict=True)


def test_saddle_trace_exponents(saddle_trace):
	assert saddle_trace.length == 5
	assert_allclose(saddle_trace.lambda_s, -LN2)
	assert_allclose(saddle_trace.lambda_u, LN2)
	assert_allclose(saddle_trace.lambda_bar_e, LN2)
	assert_allclose(saddle_trace.lambda_e, LN2)
	assert_allclose(saddle_trace.cot_angle, 0.0, atol=1e-15)
	seg = saddle_trace.segment(1, 4)
	assert seg.length == 3
	assert seg.offset == 1
	with pytest.raises(InvalidParameter):
		saddle_trace.segment(3, 7)


def test_trace_beyond_anchor_horizon(saddle):
	triple = most_contracting(saddle, [0.0, 0.0], 3)
	tr     = trace(saddle, triple, 6)
	assert tr.length == 6
	assert_allclose(tr.lambda_s, -LN2)


def test_pliss_selection():
	assert pliss_indices([-1.0, 2.0, 2.0], 2.0, 0.9, 0.0) == [1, 2]
	assert pliss_indices([1.0]*4, 2.0, 0.5, 0.0) == [0, 1, 2, 3]


@pytest.mark.parametrize('seq,l,lp,ls', [([], 2.0, 0.5, 0.0),
                                         ([3.0], 2.0, 0.5, 0.0),
                                         ([0.1, 0.1], 2.0, 0.5, 0.0),
                                         ([1.0], 2.0, 0.1, 0.5)])
def test_pliss_preconditions(seq, l, lp, ls):
	with pytest.raises(PreconditionViolated):
		pliss_indices(seq, l, lp, ls)


def _window_selection(seq, l_second):
	# every index whose forward windows all average above l_second :
	n = len(seq)
	return [i for i in range(n)
	        if all(sum(seq[i:i+k]) > k*l_second for k in range(1, n - i + 1))]


def test_pliss_matches_window_definition():
	# quarter-integer terms keep every window sum exact
	rng   = np.random.default_rng(3)
	l     = 2.0
	l_sec = 0.125
	cases = 0
	while cases < 500:
		n    = int(rng.integers(1, 21))
		seq  = [float(v) for v in rng.integers(-4, 9, n) / 4.0]
		mean = sum(seq) / n
		if not mean > l_sec:
			continue
		l_prime = l_sec + 0.9*(mean - l_sec)
		sel     = pliss_indices(seq, l, l_prime, l_sec)
		assert sel == _window_selection(seq, l_sec)
		assert len(sel) >= (l_prime - l_sec) / (l - l_sec) * n
		cases += 1


def test_good_index_scan_on_standard_map_orbits(standard):
	rng   = np.random.default_rng(11)
	seeds = rng.uniform([0.0, -math.pi], [2*math.pi, math.pi], (20, 2))
	q     = 2000
	for x in seeds:
		orbit  = iterate(standard, x, q)
		triple = most_contracting(standard, x, q, orbit=orbit)
		lbe    = trace(standard, triple, q, orbit=orbit).lambda_bar_e
		for a in (0.5, triple.anchor['log_sigma_max'] / q):
			thr = (1 - SLACK)*a
			# window sums as differences of the running sum :
			D   = np.concatenate([[0.0], np.cumsum(lbe - thr)])
			fwd = [n for n in range(q) if np.all(D[n+1:] - D[n] > 0)]
			bwd = [n for n in range(1, q + 1) if np.all(D[n] - D[:n] > 0)]
			assert _good_index_scan(lbe, thr) == (fwd, bwd)
			assert _good_index_scan(lbe[:300], thr) == \
			       good_index_bruteforce(lbe[:300], thr)


def test_good_triple_both_directions(saddle_trace):
	assert check_good_triple(saddle_trace, 5, LN2)
	assert check_good_triple(saddle_trace, 5, LN2, 'backward')

	c = check_good_triple(saddle_trace, 3, 1.0)
	assert not c
	assert c.failure['kind'] == 'average'
	assert c.failure['k'] == 1

	c = check_good_triple(saddle_trace, 3, 0.5, 'backward')
	assert c.failure['kind'] == 'exponent'
	assert c.failure['index'] == -1
	assert c.failure['value'] == pytest.approx(LN2)

	with pytest.raises(InvalidParameter):
		check_good_triple(saddle_trace, 6, LN2)
	with pytest.raises(InvalidParameter):
		check_good_triple(saddle_trace, 2, LN2, 'sideways')


def test_consequence_thresholds():
	t = consequence_thresholds(2.0)
	assert t['lambda_s'] == -1.0
	assert t['lambda_e'] == pytest.approx(0.99*2.0)
	assert t['min_3lambda_e'] == pytest.approx(-0.2)


def test_good_consequences(saddle_trace, rotation):
	report = good_consequences(saddle_trace, 5, LN2)
	assert report.margins['forward']['lambda_s'] == pytest.approx(LN2/2)
	assert report.margins['backward']['min_3lambda_e'] > 0

	tr = trace(rotation, TangentTriple.orthonormal([0.5, 0.0], [1.0, 0.0]), 5)
	with pytest.raises(PreconditionViolated):
		good_consequences(tr, 5, 0.1)


def test_cot_recursion(saddle_trace):
	env = cot_recursion_bound(saddle_trace, 2.0)
	assert env.terminal_below_A3
	assert len(env.envelope) == 6

	v  = np.array([[1.0, 0.0], [1.0, 0.0]])
	u  = np.array([[0.0, 1.0], [math.sqrt(0.5), math.sqrt(0.5)]])
	tr = CocycleTrace(np.zeros((2, 2)), v, u, [0.0], [0.0])
	with pytest.raises(BoundViolated) as e:
		cot_recursion_bound(tr, 0.5)
	assert e.value.details['step'] == 0


def test_good_in_orbit_of_saddle(saddle):
	res = good_in_orbit(saddle, [0.0, 0.0], 10, LN2)
	assert res.indices == list(range(1, 10))
	assert res.density['both'] == 1.0


def test_refine_seeds_to_standard_map_fixed_point(standard):
	refined = refine_periodic_seeds(standard, [[0.01, 0.01]], max_period=1)
	assert refined[0].period == 1
	assert refined[0].monodromy_trace == pytest.approx(8.0)
	assert standard.domain.distance(refined[0].point, [0.0, 0.0]) < 1e-9


def test_auto_min_return():
	assert auto_min_return(LN2) == 7
	assert auto_min_return(100.0) == 1


def test_saddle_good_point(saddle):
	cert = find_good_point(saddle, [[0.0, 0.0]], 8, 'auto', match_radius=1e-13,
	                       min_return='auto')
	assert isinstance(cert, GoodPointCertificate)
	assert cert.L == 7
	assert cert.seed_index == 0
	assert cert.a == pytest.approx(LN2)
	assert verify_goodpoint(cert)['ok']


def test_good_point_round_trip_and_tamper(saddle):
	cert = find_good_point(saddle, [[0.0, 0.0]], 8, LN2, match_radius=1e-13,
	                       min_return=3)
	assert cert.L == 3
	d    = json.loads(dumps(cert))
	back = GoodPointCertificate.from_dict(d)
	assert back.L == cert.L
	assert verify_goodpoint(back)['ok']

	d['trace']['lambda_u'][0] += 0.1
	report = verify_goodpoint(GoodPointCertificate.from_dict(d))
	assert not report['exponents']
	assert not report['ok']

	d['schema'] = 'other'
	with pytest.raises(InvalidParameter):
		GoodPointCertificate.from_dict(d)


def test_standard_map_good_point(standard):
	seeds = refine_periodic_seeds(standard, [[0.01, 0.01]], max_period=1)
	cert  = find_good_point(standard, seeds, 400, 'auto', match_radius=1e-13,
	                        min_return='auto')
	assert isinstance(cert, GoodPointCertificate)
	assert cert.L == 3
	assert cert.period == 1
	assert verify_goodpoint(cert)['ok']


def test_rotation_has_no_good_point(rotation):
	res = find_good_point(rotation, rotation.domain.halton(8), 50, 0.1)
	assert isinstance(res, NotFound)
	assert res.statistics['seeds'] == 8
	assert res.statistics['forward'] == [0]*8


def test_search_is_thread_independent(standard):
	a = goodpoint_search(standard, 200, 'auto', {'seeds' : 6,
	                                            'match_radius' : 1e-13,
	                                            'min_return' : 'auto'},
	                     threads=1)
	b = goodpoint_search(standard, 200, 'auto', {'seeds' : 6,
	                                            'match_radius' : 1e-13,
	                                            'min_return' : 'auto'},
	                     threads=3)
	assert type(a) is type(b)
	if isinstance(a, GoodPointCertificate):
		assert (a.seed_index, a.start, a.L) == (b.seed_index, b.start, b.L)


def test_search_rejects_bad_input(saddle):
	with pytest.raises(InvalidParameter):
		find_good_point(saddle, [[0.0, 0.0]], 1, LN2)
	with pytest.raises(InvalidParameter):
		find_good_point(saddle, [[0.0, 0.0]], 8, LN2, match_radius=0.0)
	with pytest.raises(ConfigError):
		goodpoint_search(saddle, 8, LN2, {'radius' : 1.0})


def _shared_bucket(domain, points, angles, radius):
	v_s = np.array([[math.cos(t), math.sin(t)] for t in angles])
	v_u = np.array([[-math.sin(t), math.cos(t)] for t in angles])
	cells, sides, mods = _cells(np.array(points), v_s, v_u, 2*radius, domain)
	return tuple(cells[0]) in _neighbor_keys(cells[1], sides[1], mods) and \
	       tuple(cells[1]) in _neighbor_keys(cells[0], sides[0], mods)


@pytest.mark.parametrize('points,angles',
	[([[1e-7, 0.0], [2*math.pi - 1e-7, 0.0]], [0.6, 0.6]),
	 ([[1.0, -math.pi + 1e-7], [1.0, math.pi - 1e-7]], [0.6, 0.6]),
	 ([[1.0, 0.5], [1.0, 0.5]], [1e-7, math.pi - 1e-7]),
	 ([[1.0, 0.5], [1.0, 0.5]], [0.5*math.pi - 1e-7, 0.5*math.pi + 1e-7])])
def test_hash_neighbors_across_seams(standard, points, angles):
	# torus seams in both coordinates, then the line seam of v_s and of v_u
	assert _shared_bucket(standard.domain, points, angles, 1e-3)


def test_hash_keeps_distant_points_apart(standard, saddle):
	assert not _shared_bucket(standard.domain, [[1.0, 0.5], [2.0, 0.5]],
	                          [0.6, 0.6], 1e-3)
	assert not _shared_bucket(saddle.domain, [[1e-7, 0.0], [2*math.pi, 0.0]],
	                          [0.6, 0.6], 1e-3)


def test_plain_search_pairs_returns_on_standard_map(standard):
	res = goodpoint_search(standard, 2000, 0.3, {'seeds'        : 8,
	                                            'match_radius' : 0.5})
	assert isinstance(res, GoodPointCertificate)
	assert not res.refined
	assert res.period is None
	assert max(res.distances) < 0.5
	assert res.to_dict()['refined'] is False
	assert verify_goodpoint(res)['ok']


def test_refined_search_is_recorded(standard):
	seeds = refine_periodic_seeds(standard, [[0.01, 0.01]], max_period=1)
	cert  = find_good_point(standard, seeds, 400, 'auto', match_radius=1e-13,
	                        min_return='auto')
	assert cert.refined
	back  = GoodPointCertificate.from_dict(json.loads(dumps(cert)))
	assert back.refined


def test_angle_bound_at_a_is_recorded(saddle):
	cert = find_good_point(saddle, [[0.0, 0.0]], 8, LN2, match_radius=1e-13,
	                       min_return=3)
	# cap = max(a, log d1_bound) = log 2 = a here, and cot = 0 at both ends
	assert cert.cap == pytest.approx(LN2)
	assert cert.angles_at_a
	report = verify_goodpoint(cert)
	assert report['angles'] and report['angles_at_a']
