# -*- coding: utf-8 -*-
#
# clslvr documentation build configuration file.
#
# This file is execfile()d with the current directory set to its
# containing dir.

import os
import sys
sys.path.insert(0, os.path.abspath('../clslvr/'))
sys.path.insert(0, os.path.abspath('..'))

intersphinx_mapping = \
{
  'python'    : ('https://docs.python.org/3', None),
  'numpy'     : ('https://numpy.org/doc/stable/', None),
  'scipy'     : ('https://docs.scipy.org/doc/scipy/', None),
  'sympy'     : ('https://docs.sympy.org/latest/', None),
  'mpmath'    : ('https://mpmath.org/doc/current/', None),
  'shapely'   : ('https://shapely.readthedocs.io/en/stable/', None)
}

# modules that need not be installed to build the docs :
from unittest.mock import MagicMock

class Mock(MagicMock):
  __all__ = []
  @classmethod
  def __getattr__(cls, name):
    return Mock()

MOCK_MODULES = ['shapely',
                'shapely.geometry',
                'colored',
                'termcolor',
                'more_itertools']
sys.modules.update((mod_name, Mock()) for mod_name in MOCK_MODULES)

# -- General configuration ------------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.intersphinx',
    'sphinx.ext.mathjax',
    'sphinx.ext.viewcode',
]

templates_path = ['_templates']
source_suffix  = '.rst'
master_doc     = 'index'

project   = u'clslvr'
copyright = u'2026, the clslvr developers'
author    = u'the clslvr developers'

version = u'2026'
release = u'2026.1.0'

language = None

exclude_patterns = ['_build', 'Thumbs.db', '.DS_Store']

pygments_style = 'sphinx'

todo_include_todos = False

# -- Options for HTML output ----------------------------------------------

import sphinx_rtd_theme
html_theme      = 'sphinx_rtd_theme'
html_theme_path = [sphinx_rtd_theme.get_html_theme_path()]

html_static_path = []

htmlhelp_basename = 'clslvrdoc'

# -- Options for LaTeX output ---------------------------------------------

latex_elements = {
}

latex_documents = [
    (master_doc, 'clslvr.tex', u'clslvr Documentation',
     u'the clslvr developers', 'manual'),
]

# -- Options for manual page output ---------------------------------------

man_pages = [
    (master_doc, 'clslvr', u'clslvr Documentation',
     [author], 1)
]
