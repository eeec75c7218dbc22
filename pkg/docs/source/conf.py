# -*- coding: utf-8 -*-
#
# crystalspectra documentation build configuration file.
#
# This file is execfile()d with the current directory set to its
# containing dir.

import sys
import os

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..", "..")))

from crystalspectra.version import __version__, __release__

# -- General configuration ------------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'sphinxcontrib.napoleon',
]

templates_path = ['ntemplates']
source_suffix = '.rst'
master_doc = 'index'

project = u'crystalspectra'
copyright = u'2024, the crystalspectra developers'

version = __version__
release = __release__

exclude_patterns = []
pygments_style = 'sphinx'

# -- Options for HTML output ----------------------------------------------

html_theme = 'default'
html_static_path = ['nstatic']
htmlhelp_basename = 'crystalspectradoc'

# -- Options for LaTeX output ---------------------------------------------

latex_elements = {
}

latex_documents = [
  ('index', 'crystalspectra.tex', u'crystalspectra Documentation',
   u'the crystalspectra developers', 'manual'),
]

# -- Options for manual page output ---------------------------------------

man_pages = [
    ('index', 'crystalspectra', u'crystalspectra Documentation',
     [u'the crystalspectra developers'], 1)
]

# -- Options for Texinfo output -------------------------------------------

texinfo_documents = [
  ('index', 'crystalspectra', u'crystalspectra Documentation',
   u'the crystalspectra developers', 'crystalspectra',
   'Spectral and scattering toolkit for periodic graphs', 'Miscellaneous'),
]
