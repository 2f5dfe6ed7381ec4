"""
Console output and persistence.  Text goes through :func:`print_text` in the
color of the calling class; results are written as JSON and CSV with every
float carried at 17 significant digits.
"""
from colored   import fg, attr
from termcolor import colored
import numpy   as np
import mpmath
import json
import csv
import sys
import os

_verbose = True


def set_verbosity(verbose):
	"""
	Turn progress output on or off.

	:param verbose: ``True`` to print, ``False`` to stay silent
	:type verbose: bool
	"""
	global _verbose
	_verbose = bool(verbose)


def get_text(text, color=None, atrb=0, cls=None):
	"""
	Returns text ``text`` from calling class ``cls`` for printing at a later time.

	:param text: the text to print
	:param color: the color of the text to print
	:param atrb: attributes to send use by ``colored`` package
	:param cls: the calling class
	:type text: string
	:type color: string
	:type atrb: int
	:type cls: object
	"""
	if cls is not None:
		color = cls.color()
	if color is None:
		text = text
	else:
		if atrb != 0:
			text = ('%s%s' + text + '%s') % (fg(color), attr(atrb), attr(0))
		else:
			text = ('%s' + text + '%s') % (fg(color), attr(0))
	return text


def print_text(text, color=None, atrb=0, cls=None):
	"""
	Print text ``text`` from calling class ``cls`` to the screen.

	:param text: the text to print
	:param color: the color of the text to print
	:param atrb: attributes to send use by ``colored`` package
	:param cls: the calling class
	:type text: string
	:type color: string
	:type atrb: int
	:type cls: object
	"""
	if _verbose:
		print(get_text(text, color, atrb, cls))


def print_error(text):
	"""
	Print ``text`` in bold red on the diagnostic stream, regardless of the
	verbosity setting.
	"""
	print(colored(text, 'red', attrs=['bold']), file=sys.stderr)


def print_min_max(u, title, color='97', cls=None):
	"""
	Print the minimum and maximum values of the array ``u``.

	:param u: the variable to print the min and max of
	:param title: the name of the variable
	:param color: the color of printed text
	:type u: :class:`~numpy.ndarray`, list, float
	:type title: string
	:type color: string
	"""
	u    = np.asarray(u, dtype=float)
	uMin = np.nanmin(u) if u.size else np.nan
	uMax = np.nanmax(u) if u.size else np.nan
	s    = title + ' <min, max> : <%.3e, %.3e>' % (uMin, uMax)
	print_text(s, color, cls=cls)


def print_params(title, params, cls=None, color=None):
	"""
	Echo the parameter dictionary ``params`` under the banner ``title``.
	"""
	print_text("::: %s :::" % title, color, cls=cls)
	print_text(json.dumps(to_plain(params), sort_keys=True, indent=2),
	           color, cls=cls)


#===============================================================================
# serialization :

def format_float(x):
	"""
	Format the float ``x`` with 17 significant digits; non-finite values use
	the ``Infinity`` / ``-Infinity`` / ``NaN`` spelling that :mod:`json` reads.

	:rtype: string
	"""
	x = float(x)
	if x != x:
		return 'NaN'
	if x == np.inf:
		return 'Infinity'
	if x == -np.inf:
		return '-Infinity'
	return '%.17g' % x


def to_plain(obj):
	"""
	Convert ``obj`` recursively into dicts, lists, strings, ints, floats,
	booleans and ``None``.  Objects providing ``to_dict()`` are expanded,
	numpy scalars and arrays are unpacked, and :mod:`mpmath` numbers become
	floats.
	"""
	if hasattr(obj, 'to_dict'):
		return to_plain(obj.to_dict())
	if isinstance(obj, dict):
		return dict((str(k), to_plain(v)) for k, v in obj.items())
	if isinstance(obj, (list, tuple)):
		return [to_plain(v) for v in obj]
	if isinstance(obj, np.ndarray):
		return to_plain(obj.tolist())
	if isinstance(obj, (bool, np.bool_)):
		return bool(obj)
	if isinstance(obj, (int, np.integer)):
		return int(obj)
	if isinstance(obj, (float, np.floating, mpmath.mpf)):
		return float(obj)
	return obj


def dumps(obj, indent=2):
	"""
	Serialize ``obj`` to JSON text with 17-significant-digit floats and
	sorted keys, so that equal inputs give byte-identical output.

	:rtype: string
	"""
	return _encode(to_plain(obj), indent, 0) + '\n'


def _encode(obj, indent, level):
	pad  = '\n' + ' ' * (indent * (level + 1))
	end  = '\n' + ' ' * (indent * level)
	if isinstance(obj, dict):
		if not obj:
			return '{}'
		items = ['%s: %s' % (json.dumps(k), _encode(obj[k], indent, level + 1))
		         for k in sorted(obj)]
		return '{' + pad + (',' + pad).join(items) + end + '}'
	if isinstance(obj, list):
		if not obj:
			return '[]'
		if all(not isinstance(v, (dict, list)) for v in obj):
			return '[' + ', '.join(_encode(v, indent, level + 1) for v in obj) + ']'
		items = [_encode(v, indent, level + 1) for v in obj]
		return '[' + pad + (',' + pad).join(items) + end + ']'
	if isinstance(obj, bool) or obj is None:
		return json.dumps(obj)
	if isinstance(obj, int):
		return str(obj)
	if isinstance(obj, float):
		return format_float(obj)
	return json.dumps(obj)


def write_json(obj, path):
	"""
	Write ``obj`` to ``path`` with :func:`dumps`, creating parent directories.
	"""
	d = os.path.dirname(os.path.abspath(path))
	if not os.path.isdir(d):
		os.makedirs(d)
	with open(path, 'w') as f:
		f.write(dumps(obj))


def read_json(path):
	"""
	Read the JSON document at ``path``.

	:rtype: dict
	"""
	with open(path, 'r') as f:
		return json.load(f)


def write_csv(rows, columns, path):
	"""
	Write the list of dicts ``rows`` to ``path`` with header ``columns``.
	Floats are written with 17 significant digits and missing values are
	left empty.
	"""
	d = os.path.dirname(os.path.abspath(path))
	if not os.path.isdir(d):
		os.makedirs(d)
	with open(path, 'w', newline='') as f:
		writer = csv.writer(f, lineterminator='\n')
		writer.writerow(columns)
		for row in rows:
			writer.writerow([_csv_cell(row.get(c)) for c in columns])


def _csv_cell(v):
	v = to_plain(v)
	if v is None:
		return ''
	if isinstance(v, bool):
		return 'true' if v else 'false'
	if isinstance(v, float):
		return format_float(v)
	if isinstance(v, (list, dict)):
		return json.dumps(v, sort_keys=True)
	return str(v)
