#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#
# fuzzyfluid documentation build configuration file.

import os
import sys

sys.path.insert(0, os.path.abspath('..'))
sys.path.insert(0, os.path.abspath('../fuzzyfluid'))

import sphinx_rtd_theme
from fuzzyfluid import __version__ as ff_version

# -- General configuration ------------------------------------------------

extensions = ['sphinx.ext.autodoc',
              'sphinx.ext.intersphinx',
              'sphinx.ext.mathjax',
              'sphinx.ext.viewcode',
              'numpydoc', 'sphinxarg.ext', ]

templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'

project = 'fuzzyfluid'
copyright = '2026, fuzzyfluid developers'
author = 'fuzzyfluid developers'

version = ff_version
release = ff_version

language = 'en'
exclude_patterns = ['_build', 'Thumbs.db', '.DS_Store']
pygments_style = 'sphinx'
todo_include_todos = False

# -- Options for HTML output ----------------------------------------------

html_show_sourcelink = False
html_theme = "sphinx_rtd_theme"
html_static_path = ['_static']
htmlhelp_basename = 'fuzzyfluiddoc'

man_pages = [
    (master_doc, 'fuzzyfluid', 'fuzzyfluid Documentation',
     [author], 1)
]

intersphinx_mapping = {'python': ('https://docs.python.org/3', None),
                       'numpy': ('https://numpy.org/doc/stable', None),
                       'scipy': ('https://docs.scipy.org/doc/scipy', None)}
