import os
import pytest

from clslvr.helper      import ConfigError
from clslvr.inputoutput import read_json, write_json
from clslvr.cli         import ExperimentConfig, run, main, build_parser, \
                               config_from_args


def _config(**kw):
	d = {'operation' : 'rigidity-rotation',
	     'map' : {'name' : 'rigid-rotation', 'parameters' : {'eps' : 0.1}},
	     'parameters' : {'seeds' : 4, 'iterations' : 50},
	     'rng_seed' : 3}
	d.update(kw)
	return ExperimentConfig.from_dict(d)


def test_config_round_trip(tmp_path):
	c    = _config(outputs={'json' : 'out.json'}, budget={'max_iterations' : 10})
	path = str(tmp_path / 'run.json')
	write_json(c, path)
	assert ExperimentConfig.from_dict(read_json(path)) == c
	assert c.make_map().eps == 0.1


@pytest.mark.parametrize('change', [{'parameters' : {'seeds' : 4, 'bogus' : 1}},
                                    {'outputs' : {'pdf' : 'x.pdf'}},
                                    {'budget' : {'max_memory' : 1}},
                                    {'map' : {'name' : 'rigid-rotation',
                                              'params' : {}}},
                                    {'map' : None},
                                    {'operation' : 'plot'},
                                    {'extra' : True}])
def test_config_rejects_unknown_keys(change):
	with pytest.raises(ConfigError):
		_config(**change)


def test_mapless_operations_need_no_map():
	c = ExperimentConfig('arith', parameters={'alpha' : 'surd:1,-1,5,2'})
	assert c.make_map() is None


def test_run_reports_errors_in_summary():
	c = ExperimentConfig('rigidity-rotation',
	                     {'name' : 'linear-saddle', 'parameters' : {}})
	code, summary, rows = run(c, threads=1)
	assert code == 1
	assert summary['status'] == 'error'
	assert summary['error']['error'] == 'InvalidParameter'
	assert rows == []


def test_run_rotation():
	code, summary, rows = run(_config(), threads=1)
	assert code == 0
	assert summary['status'] == 'ok'
	assert summary['seed'] == 3
	assert summary['result']['value'] == pytest.approx(0.1, abs=1e-12)
	assert len(rows) == 4


def test_flags_build_the_config():
	args = build_parser().parse_args(['certify', '--map', 'linear-saddle',
	                                  '--mu', '2', '--q', '8', '--a', 'auto',
	                                  '--min-return', '3', '--M', '6',
	                                  '--param', 'extent=100',
	                                  '--max-iterations', '1000'])
	c    = config_from_args(args)
	assert c.operation == 'certify'
	assert c.map == {'name' : 'linear-saddle',
	                 'parameters' : {'mu' : 2.0, 'extent' : 100}}
	assert c.parameters == {'q' : 8, 'a' : 'auto',
	                        'goodpoint' : {'min_return' : 3},
	                        'certify' : {'M' : 6}}
	assert c.budget == {'max_iterations' : 1000}

	args = build_parser().parse_args(['goodpoint', '--map', 'standard-map',
	                                  '--q', '400', '--no-refine'])
	assert config_from_args(args).parameters['goodpoint'] == {'refine' : False}


def test_usage_errors_exit_with_one(capsys):
	assert main([]) == 1
	assert main(['arith', '--bogus']) == 1
	assert main(['rigidity', 'spin', '--map', 'rigid-rotation']) == 1
	assert main(['scan', 'growth', '--map', 'rigid-rotation',
	             '--param', 'eps']) == 1


def test_arith_writes_json_and_csv(tmp_path):
	js   = str(tmp_path / 'arith.json')
	cs   = str(tmp_path / 'arith.csv')
	code = main(['arith', '--alpha', 'surd:1,-1,5,2', '--depth', '10',
	             '--a', '0.5', '--json', js, '--csv', cs, '--quiet'])
	assert code == 0
	s = read_json(js)
	assert s['schema'] == 'clslvr-summary/1'
	assert s['status'] == 'ok'
	assert s['result']['expansion']['partial_quotients'] == [1]*10
	assert s['result']['classification']['label'] == 'brjuno-consistent'
	assert s['result']['N'] == 9
	assert 'wall_time' not in s
	assert os.path.exists(str(tmp_path / 'arith.timings.json'))
	with open(cs) as f:
		lines = f.read().splitlines()
	assert lines[0] == 'n,a,p,q,brjuno_term'
	assert len(lines) == 11


def test_free_disc_summary_is_reproducible(tmp_path):
	js   = str(tmp_path / 'disc.json')
	argv = ['rigidity', 'free-disc', '--map', 'rigid-rotation',
	        '--eps', '0.3', '--rotation', '0.3', '--trials', '100',
	        '--horizon', '5', '--seed', '4', '--json', js, '--quiet']
	assert main(argv) == 0
	with open(js) as f:
		first = f.read()
	assert main(argv + ['--threads', '3']) == 0
	with open(js) as f:
		second = f.read()
	assert read_json(js)['seed'] == 4
	assert first == second
	timings = read_json(str(tmp_path / 'disc.timings.json'))
	assert timings['threads'] == 3


def test_search_without_result_exits_with_two(tmp_path):
	js = str(tmp_path / 'gp.json')
	assert main(['goodpoint', '--map', 'rigid-rotation', '--q', '50',
	             '--a', '0.1', '--halton', '8', '--json', js, '--quiet']) == 2
	assert read_json(js)['status'] == 'not-found'


def test_certify_then_verify(tmp_path):
	cert = str(tmp_path / 'cert.json')
	diag = str(tmp_path / 'diag.csv')
	js   = str(tmp_path / 'summary.json')
	assert main(['certify', '--map', 'linear-saddle', '--mu', '2', '--q', '8',
	             '--out', cert, '--diagnostics', diag, '--json', js,
	             '--quiet']) == 0
	s = read_json(js)
	assert s['result']['regime'] == 'geometric'
	assert s['result']['period'] == 7
	assert s['result']['refined']
	assert os.path.exists(diag)
	assert main(['verify-cert', cert, '--quiet']) == 0

	d = read_json(cert)
	d['fixed_point'] = [0.5, 0.5]
	write_json(d, cert)
	assert main(['verify-cert', cert, '--quiet']) == 1


def test_config_file_reruns(tmp_path):
	saved = str(tmp_path / 'saved.json')
	js    = str(tmp_path / 'out.json')
	assert main(['rigidity', 'rotation', '--map', 'rigid-rotation',
	             '--eps', '0.25', '--n-seeds', '3', '--iterations', '20',
	             '--save-config', saved, '--quiet']) == 0
	d = read_json(saved)
	assert d['parameters'] == {'seeds' : 3, 'iterations' : 20}
	d['outputs'] = {'json' : js}
	write_json(d, saved)
	assert main(['rigidity', 'rotation', '--config', saved, '--quiet']) == 0
	assert read_json(js)['result']['value'] == pytest.approx(0.25, abs=1e-12)
