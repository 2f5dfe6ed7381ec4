"""
Command-line entry point.

Every run is described by an :class:`ExperimentConfig`, built from the
flags or read with ``--config``, and writes a JSON summary echoing the
config, the package versions and the seed; wall-clock timings go to the
``<summary>.timings.json`` sidecar so summaries of equal runs are
byte-identical.  Exit codes are 0 on success, 2 when a search found
nothing and 1 on errors.
"""
from clslvr             import __version__
from clslvr.helper      import ClslvrError, ConfigError, NotFound, \
                               default_threads
from clslvr.inputoutput import print_text, print_error, print_params, \
                               set_verbosity, write_json, read_json, \
                               write_csv, dumps
from clslvr.maps        import builtin, derivative_growth
from clslvr.arithmetic  import cf_expand, classify, brjuno_partial_sum, \
                               brjuno_tail, brjuno_terms, \
                               superliouville_profile, nonbrjuno_subsequence
from clslvr.cocycle     import goodpoint_search
from clslvr.certifier   import certify, verify_certificate, \
                               CERTIFY_MATCH_RADIUS
from clslvr             import rigidity
import argparse
import datetime
import platform
import json
import time
import sys
import os
import numpy                as np
import scipy


# parameters accepted by every operation :
OPERATIONS = {'arith'                : ('alpha', 'depth', 'N', 'H',
                                        'max_terms', 'a'),
              'scan-growth'          : ('n_list', 'grid'),
              'scan-gap'             : ('q_sequence', 'theta', 'H', 'strict',
                                        'grid'),
              'goodpoint'            : ('q', 'a', 'goodpoint'),
              'certify'              : ('q', 'a', 'goodpoint', 'certify'),
              'rigidity-rotation'    : ('seeds', 'iterations'),
              'rigidity-displacement': ('eps', 'grid', 'ball_samples'),
              'rigidity-free-disc'   : ('eps', 'trials', 'horizon'),
              'rigidity-kac'         : ('center', 'radius', 'samples',
                                        'horizon'),
              'rigidity-holder'      : ('alpha', 'a', 'C', 'j_list', 'grid'),
              'rigidity-nonbrjuno'   : ('alpha', 'H', 'max_terms', 'depth',
                                        'grid'),
              'verify-cert'          : ('certificate',)}

MAPLESS   = ('arith', 'verify-cert')
OUTPUTS   = ('json', 'csv', 'out', 'diagnostics')
BUDGET    = ('max_iterations', 'max_wall_time')
SCHEMA    = 'clslvr-summary/1'


class ExperimentConfig(object):
	"""
	The serializable record of one run : the operation, the map spec
	``{'name', 'parameters'}``, the operation parameters, the seed, the
	output paths and the budget.  Unknown keys raise
	:class:`~helper.ConfigError`.
	"""
	FIELDS = ('operation', 'map', 'parameters', 'rng_seed', 'outputs', 'budget')

	def __init__(self, operation, map=None, parameters=None, rng_seed=0,
	             outputs=None, budget=None):
		if operation not in OPERATIONS:
			raise ConfigError("unknown operation '%s'" % operation)
		parameters = dict(parameters or {})
		outputs    = dict(outputs or {})
		budget     = dict(budget or {})
		for name, d, allowed in (('parameter', parameters, OPERATIONS[operation]),
		                         ('output', outputs, OUTPUTS),
		                         ('budget', budget, BUDGET)):
			unknown = sorted(set(d) - set(allowed))
			if len(unknown) > 0:
				raise ConfigError("unknown %s keys for '%s' : %s"
				                  % (name, operation, ', '.join(unknown)),
				                  unknown=unknown)
		if map is not None:
			unknown = sorted(set(map) - set(('name', 'parameters')))
			if len(unknown) > 0 or 'name' not in map:
				raise ConfigError("a map spec has the keys 'name' and "
				                  "'parameters'", unknown=unknown)
			map = {'name' : map['name'],
			       'parameters' : dict(map.get('parameters') or {})}
		elif operation not in MAPLESS:
			raise ConfigError("operation '%s' needs a map" % operation)
		self.operation  = operation
		self.map        = map
		self.parameters = parameters
		self.rng_seed   = int(rng_seed)
		self.outputs    = outputs
		self.budget     = budget

	def color(self):
		"""
		return the default color for this class.
		"""
		return '230'

	def __eq__(self, other):
		return isinstance(other, ExperimentConfig) and \
		       json.loads(dumps(self)) == json.loads(dumps(other))

	def to_dict(self):
		"""
		:rtype: dict
		"""
		return {'operation'  : self.operation,
		        'map'        : self.map,
		        'parameters' : self.parameters,
		        'rng_seed'   : self.rng_seed,
		        'outputs'    : self.outputs,
		        'budget'     : self.budget}

	@classmethod
	def from_dict(cls, d):
		"""
		Rebuild a config from :meth:`to_dict` output.
		"""
		unknown = sorted(set(d) - set(cls.FIELDS))
		if len(unknown) > 0:
			raise ConfigError("unknown config keys : %s" % ', '.join(unknown),
			                  unknown=unknown)
		if 'operation' not in d:
			raise ConfigError("config has no operation")
		return cls(d['operation'], d.get('map'), d.get('parameters'),
		           d.get('rng_seed', 0), d.get('outputs'), d.get('budget'))

	def make_map(self):
		"""
		The catalog map of this config, ``None`` for map-free operations.
		"""
		if self.map is None:
			return None
		return builtin(self.map['name'], self.map['parameters'])


class Outcome(object):
	"""
	What a handler returns : exit status, result, CSV rows and the
	truncation marker.
	"""
	def __init__(self, result, rows=None, status=0, truncated=False):
		self.result    = result
		self.rows      = rows or []
		self.status    = status
		self.truncated = truncated


#===============================================================================
# handlers :

class _Deadline(object):

	def __init__(self, seconds):
		self.end = None if seconds is None else time.time() + float(seconds)

	def passed(self):
		return self.end is not None and time.time() > self.end


def _arith(config, map, threads, deadline):
	p   = config.parameters
	cf  = cf_expand(p['alpha'], p.get('depth', 30))
	N   = min(p.get('N', 30), cf.depth - 1)
	res = {'expansion'      : cf.to_dict(),
	       'classification' : classify(cf).to_dict(),
	       'brjuno_partial' : brjuno_partial_sum(cf, N),
	       'brjuno_tail'    : brjuno_tail(cf, N),
	       'N'              : N}
	if 'a' in p:
		res['profile'] = superliouville_profile(cf, p['a']).to_dict()
	if 'H' in p:
		res['subsequence'] = nonbrjuno_subsequence(cf, p['H'],
		                                    p.get('max_terms', 8)).to_dict()
	terms = brjuno_terms(cf)
	rows  = [{'n' : n, 'a' : cf.partial_quotients[n], 'p' : cf.p(n),
	          'q' : cf.q(n), 'brjuno_term' : terms[n]}
	         for n in range(cf.depth)]
	return Outcome(res, rows)


def _scan_growth(config, map, threads, deadline):
	p     = config.parameters
	limit = config.budget.get('max_iterations')
	rows  = []
	trunc = False
	for n in p.get('n_list', [1, 10, 100]):
		if deadline.passed() or (limit is not None and n > limit):
			trunc = True
			break
		rows.extend(derivative_growth(map, [n], p.get('grid'), threads).rows())
	return Outcome({'rows' : len(rows)}, rows, truncated=trunc)


def _scan_gap(config, map, threads, deadline):
	p   = config.parameters
	rep = rigidity.growth_gap_scan(map, p['q_sequence'], p['theta'], p['H'],
	                   strict         = p.get('strict', False),
	                   grid           = p.get('grid'),
	                   max_iterations = config.budget.get('max_iterations',
	                                                      10**6),
	                   threads        = threads)
	return Outcome(rep.summary(), rep.rows(),
	               truncated=rep['truncated'])


def _goodpoint_params(p):
	gp = {'min_return' : 'auto', 'match_radius' : CERTIFY_MATCH_RADIUS,
	      'refine' : True}
	gp.update(p.get('goodpoint') or {})
	return gp


def _goodpoint(config, map, threads, deadline):
	p  = config.parameters
	gp = goodpoint_search(map, p['q'], p.get('a', 'auto'),
	                      p.get('goodpoint'), threads)
	if isinstance(gp, NotFound):
		return Outcome(gp.to_dict(), status=2)
	if 'out' in config.outputs:
		write_json(gp, config.outputs['out'])
	tr   = gp.trace
	rows = [{'n' : n, 'lambda_s' : tr.lambda_s[n], 'lambda_u' : tr.lambda_u[n],
	         'lambda_e' : tr.lambda_e[n], 'cot_angle' : tr.cot_angle[n]}
	        for n in range(tr.length)]
	return Outcome(gp.to_dict(), rows)


def _certify(config, map, threads, deadline):
	p  = config.parameters
	gp = goodpoint_search(map, p['q'], p.get('a', 'auto'),
	                      _goodpoint_params(p), threads)
	if isinstance(gp, NotFound):
		return Outcome(gp.to_dict(), status=2)
	cert = certify(map, gp, p.get('certify'), threads)
	if 'out' in config.outputs:
		write_json(cert, config.outputs['out'])
	rows = cert.diagnostic_rows()
	if 'diagnostics' in config.outputs:
		write_csv(rows, _columns(rows), config.outputs['diagnostics'])
	return Outcome({'regime' : cert.regime, 'period' : cert.period,
	                'refined' : gp.refined,
	                'degree' : cert.degree, 'fixed_point' : cert.fixed_point,
	                'eigenvalues' : cert.spectrum.to_dict()}, rows)


def _rotation(config, map, threads, deadline):
	p     = config.parameters
	seeds = map.domain.halton(p.get('seeds', 16), 0.9)
	est   = rigidity.rotation_number(map, seeds, p.get('iterations', 10**4))
	return Outcome(est.summary(), est.rows())


def _rotation_eps(config, map, gate):
	p = config.parameters
	if 'eps' in p:
		return p['eps']
	if 'eps' in config.map['parameters']:
		return config.map['parameters']['eps']
	return gate.get('value')


def _displacement(config, map, threads, deadline):
	p    = config.parameters
	gate = rigidity.pseudo_rotation_gate(map)
	rep  = rigidity.displacement_bound(map, _rotation_eps(config, map, gate),
	                                   p.get('grid'), p.get('ball_samples', 64),
	                                   gate)
	return Outcome(rep.summary(), rep.rows())


def _free_disc(config, map, threads, deadline):
	p    = config.parameters
	gate = rigidity.pseudo_rotation_gate(map)
	rep  = rigidity.free_disc_search(map, _rotation_eps(config, map, gate),
	                                 p.get('trials', 10**4),
	                                 p.get('horizon', 1),
	                                 config.rng_seed, gate=gate,
	                                 threads=threads)
	return Outcome(rep.summary(), rep.rows())


def _kac(config, map, threads, deadline):
	p   = config.parameters
	rep = rigidity.kac_return_stats(map, (p['center'], p['radius']),
	                                p.get('samples', 4096),
	                                p.get('horizon', 10**4), config.rng_seed)
	return Outcome(rep.summary(), rep.rows())


def _holder(config, map, threads, deadline):
	p     = config.parameters
	limit = config.budget.get('max_iterations', 10**6)
	gate  = rigidity.pseudo_rotation_gate(map)
	rows  = []
	summ  = None
	trunc = False
	for j in p['j_list']:
		if deadline.passed():
			trunc = True
			break
		rep  = rigidity.holder_rigidity_check(map, p['alpha'], p['a'], p['C'],
		                                      [j], p.get('grid'), limit, gate)
		rows.extend(rep.rows())
		summ = rep.summary()
	return Outcome(summ, rows, truncated=trunc)


def _nonbrjuno(config, map, threads, deadline):
	p   = config.parameters
	rep = rigidity.nonbrjuno_rigidity_check(map, p['alpha'], p['H'],
	                     p.get('max_terms', 8), p.get('depth', 40),
	                     p.get('grid'),
	                     config.budget.get('max_iterations', 10**5))
	return Outcome(rep.summary(), rep.rows())


def _verify(config, map, threads, deadline):
	rep = verify_certificate(None, read_json(config.parameters['certificate']))
	return Outcome(rep, status=0 if rep['ok'] else 1)


HANDLERS = {'arith'                 : _arith,
            'scan-growth'           : _scan_growth,
            'scan-gap'              : _scan_gap,
            'goodpoint'             : _goodpoint,
            'certify'               : _certify,
            'rigidity-rotation'     : _rotation,
            'rigidity-displacement' : _displacement,
            'rigidity-free-disc'    : _free_disc,
            'rigidity-kac'          : _kac,
            'rigidity-holder'       : _holder,
            'rigidity-nonbrjuno'    : _nonbrjuno,
            'verify-cert'           : _verify}


def _columns(rows):
	cols = []
	for r in rows:
		for k in r:
			if k not in cols:
				cols.append(k)
	return cols


def versions():
	"""
	Versions recorded in every summary.
	"""
	return {'clslvr' : __version__, 'numpy' : np.__version__,
	        'scipy' : scipy.__version__,
	        'python' : platform.python_version()}


def run(config, threads=None):
	"""
	Execute ``config``.  Library errors are caught and reported in the
	summary.

	:param config: the run
	:param threads: worker threads; results do not depend on it
	:type config: :class:`ExperimentConfig`
	:rtype: tuple ``(exit code, summary dict, csv rows)``
	"""
	print_params('run %s' % config.operation, config.to_dict(), cls=config)
	summary = {'schema'   : SCHEMA,
	           'config'   : config.to_dict(),
	           'versions' : versions(),
	           'seed'     : config.rng_seed}
	deadline = _Deadline(config.budget.get('max_wall_time'))
	try:
		out = HANDLERS[config.operation](config, config.make_map(), threads,
		                                 deadline)
	except ClslvrError as e:
		print_error(str(e))
		summary.update(status='error', exit_code=1, error=e.to_dict())
		return 1, summary, []
	except (KeyError, TypeError, ValueError) as e:
		print_error(">>> invalid parameters for %s : %s <<<"
		            % (config.operation, e))
		summary.update(status='error', exit_code=1,
		               error={'error' : type(e).__name__, 'message' : str(e)})
		return 1, summary, []
	status = {0 : 'ok', 1 : 'failed', 2 : 'not-found'}[out.status]
	summary.update(status=status, exit_code=out.status,
	               truncated=out.truncated, result=out.result)
	if out.truncated:
		print_text("::: budget exhausted, partial results flushed :::", '208')
	return out.status, summary, out.rows


#===============================================================================
# argument parsing :

class _Parser(argparse.ArgumentParser):

	def error(self, message):
		raise ConfigError("%s : %s" % (self.prog, message))


def _number(text):
	try:
		return json.loads(text)
	except ValueError:
		return text


def _ints(text):
	return [int(v) for v in text.split(',')]


def _floats(text):
	return [float(v) for v in text.split(',')]


def _a(text):
	return text if text == 'auto' else float(text)


MAP_FLAGS = ('k', 'eps', 'mu', 'amplitude', 'radius', 'rho0', 'rho1', 'twist')


def build_parser():
	"""
	The argument parser; usage errors raise :class:`~helper.ConfigError`.
	"""
	common = _Parser(add_help=False)
	common.add_argument('--map')
	for f in MAP_FLAGS:
		common.add_argument('--' + f, type=float)
	common.add_argument('--param', action='append', default=[],
	                    metavar='KEY=VALUE')
	common.add_argument('--seed', type=int, default=0)
	common.add_argument('--threads', type=int)
	common.add_argument('--json')
	common.add_argument('--csv')
	common.add_argument('--config')
	common.add_argument('--save-config')
	common.add_argument('--quiet', action='store_true')
	common.add_argument('--max-iterations', type=int)
	common.add_argument('--max-wall-time', type=float)

	parser = _Parser(prog='clslvr', description='finitary hyperbolicity '
	                 'and rigidity experiments for area-preserving maps')
	sub    = parser.add_subparsers(dest='command')

	p = sub.add_parser('arith', parents=[common])
	p.add_argument('--alpha')
	p.add_argument('--depth', type=int)
	p.add_argument('--N', type=int)
	p.add_argument('--H', type=float)
	p.add_argument('--max-terms', type=int)
	p.add_argument('--a', type=float)

	p = sub.add_parser('scan', parents=[common])
	p.add_argument('kind', choices=['growth', 'gap'])
	p.add_argument('--n-list', type=_ints)
	p.add_argument('--grid', type=int)
	p.add_argument('--q-sequence', type=_ints)
	p.add_argument('--theta', type=float)
	p.add_argument('--H', type=float)
	p.add_argument('--strict', action='store_true', default=None)

	for name in ('goodpoint', 'certify'):
		p = sub.add_parser(name, parents=[common])
		p.add_argument('--q', type=int)
		p.add_argument('--a', type=_a)
		p.add_argument('--match-radius', type=float)
		p.add_argument('--min-return', type=_number)
		p.add_argument('--halton', type=int)
		p.add_argument('--max-period', type=int)
		p.add_argument('--refine', dest='refine', action='store_true',
		               default=None)
		p.add_argument('--no-refine', dest='refine', action='store_false')
		p.add_argument('--out')
		if name == 'certify':
			p.add_argument('--M', type=_number)
			p.add_argument('--cone-mode', choices=['analytic', 'sampled'])
			p.add_argument('--diagnostics')

	p = sub.add_parser('rigidity', parents=[common])
	p.add_argument('kind', choices=['rotation', 'displacement', 'free-disc',
	                                'kac', 'holder', 'nonbrjuno'])
	p.add_argument('--rotation', type=float)
	p.add_argument('--n-seeds', type=int)
	p.add_argument('--iterations', type=int)
	p.add_argument('--grid', type=int)
	p.add_argument('--ball-samples', type=int)
	p.add_argument('--trials', type=int)
	p.add_argument('--horizon', type=int)
	p.add_argument('--samples', type=int)
	p.add_argument('--center', type=_floats)
	p.add_argument('--disc-radius', type=float)
	p.add_argument('--alpha')
	p.add_argument('--a', type=float)
	p.add_argument('--C', type=float)
	p.add_argument('--j-list', type=_ints)
	p.add_argument('--H', type=float)
	p.add_argument('--max-terms', type=int)
	p.add_argument('--depth', type=int)

	p = sub.add_parser('verify-cert', parents=[common])
	p.add_argument('certificate')
	return parser


def _set(d, key, value):
	if value is not None:
		d[key] = value


def config_from_args(args):
	"""
	Translate parsed flags into an :class:`ExperimentConfig`.
	"""
	cmd  = args.command
	op   = {'scan' : 'scan-%s' % getattr(args, 'kind', ''),
	        'rigidity' : 'rigidity-%s' % getattr(args, 'kind', '')}.get(cmd, cmd)
	p    = {}
	g    = lambda k : getattr(args, k, None)
	if op == 'arith':
		for k in ('alpha', 'depth', 'N', 'H', 'max_terms', 'a'):
			_set(p, k, g(k))
	elif op == 'scan-growth':
		_set(p, 'n_list', g('n_list'))
		_set(p, 'grid', g('grid'))
	elif op == 'scan-gap':
		for k in ('q_sequence', 'theta', 'H', 'strict', 'grid'):
			_set(p, k, g(k))
	elif op in ('goodpoint', 'certify'):
		_set(p, 'q', g('q'))
		_set(p, 'a', g('a'))
		gp = {}
		for k, f in (('match_radius', 'match_radius'),
		             ('min_return', 'min_return'),
		             ('seeds', 'halton'), ('max_period', 'max_period'),
		             ('refine', 'refine')):
			_set(gp, k, g(f))
		if len(gp) > 0:
			p['goodpoint'] = gp
		cp = {}
		_set(cp, 'M', g('M'))
		_set(cp, 'cone_mode', g('cone_mode'))
		if len(cp) > 0:
			p['certify'] = cp
	elif op == 'rigidity-rotation':
		_set(p, 'seeds', g('n_seeds'))
		_set(p, 'iterations', g('iterations'))
	elif op == 'rigidity-displacement':
		_set(p, 'eps', g('rotation'))
		_set(p, 'grid', g('grid'))
		_set(p, 'ball_samples', g('ball_samples'))
	elif op == 'rigidity-free-disc':
		_set(p, 'eps', g('rotation'))
		_set(p, 'trials', g('trials'))
		_set(p, 'horizon', g('horizon'))
	elif op == 'rigidity-kac':
		_set(p, 'center', g('center'))
		_set(p, 'radius', g('disc_radius'))
		_set(p, 'samples', g('samples'))
		_set(p, 'horizon', g('horizon'))
	elif op == 'rigidity-holder':
		for k in ('alpha', 'a', 'C', 'j_list', 'grid'):
			_set(p, k, g(k))
	elif op == 'rigidity-nonbrjuno':
		for k in ('alpha', 'H', 'max_terms', 'depth', 'grid'):
			_set(p, k, g(k))
	elif op == 'verify-cert':
		p['certificate'] = args.certificate

	mp = None
	if args.map is not None:
		params = {}
		for f in MAP_FLAGS:
			_set(params, f, g(f))
		for kv in args.param:
			if '=' not in kv:
				raise ConfigError("--param expects KEY=VALUE, got '%s'" % kv)
			k, v = kv.split('=', 1)
			params[k] = _number(v)
		mp = {'name' : args.map, 'parameters' : params}

	outputs = {}
	for k in OUTPUTS:
		_set(outputs, k, g(k))
	budget = {}
	_set(budget, 'max_iterations', g('max_iterations'))
	_set(budget, 'max_wall_time', g('max_wall_time'))
	return ExperimentConfig(op, mp, p, args.seed, outputs, budget)


def _timings_path(path):
	return os.path.splitext(path)[0] + '.timings.json'


def main(argv=None):
	"""
	Parse ``argv``, run and write the artifacts.

	:rtype: int exit code
	"""
	start = time.time()
	stamp = datetime.datetime.now(datetime.timezone.utc).isoformat()
	try:
		args = build_parser().parse_args(argv)
		if args.command is None:
			raise ConfigError("no subcommand given; see clslvr --help")
		set_verbosity(not args.quiet)
		if args.config is not None:
			config = ExperimentConfig.from_dict(read_json(args.config))
		else:
			config = config_from_args(args)
		if args.save_config is not None:
			write_json(config, args.save_config)
		threads = args.threads if args.threads is not None \
		          else default_threads()
	except ClslvrError as e:
		print_error(str(e))
		return 1
	except (OSError, ValueError) as e:
		print_error(">>> cannot read the configuration : %s <<<" % e)
		return 1
	code, summary, rows = run(config, threads)

	path = config.outputs.get('json')
	if path is not None:
		write_json(summary, path)
		write_json({'started' : stamp, 'wall_time' : time.time() - start,
		            'threads' : threads}, _timings_path(path))
	if 'csv' in config.outputs and len(rows) > 0:
		write_csv(rows, _columns(rows), config.outputs['csv'])
	print_text("::: %s finished with status %s :::"
	           % (config.operation, summary['status']), cls=config)
	return code


if __name__ == '__main__':
	sys.exit(main())
