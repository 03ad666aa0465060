# Configuration file for the Sphinx documentation builder.
#
# This file only contains a selection of the most common options. For a full
# list see the documentation:
# https://www.sphinx-doc.org/en/master/usage/configuration.html

from datetime import date
import sphinx_rtd_theme

# -- Project information -----------------------------------------------------
try:
    from importlib.metadata import version as get_version

    version = get_version("azee")
except ImportError:
    from pkg_resources import get_distribution

    version = get_distribution("azee").version

short_version = ".".join(version.split(".")[:2])
project = "azee {}".format(short_version)
copyright = "{0}, the azee developers".format(date.today().year)
author = "the azee developers"

# -- General configuration ---------------------------------------------------

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.autosummary",
    "sphinx.ext.viewcode",
    "autoapi.extension",
    "numpydoc",
]

templates_path = ["_templates"]
exclude_patterns = ["_build", "Thumbs.db", ".DS_Store"]

# AutoAPI
autoapi_type = "python"
autoapi_dirs = ["../src/azee"]
autoapi_options = ["members", "undoc-members", "show-module-summary"]
autoapi_include_summaries = True

# -- Options for HTML output -------------------------------------------------

html_theme = "sphinx_rtd_theme"
html_theme_path = [sphinx_rtd_theme.get_html_theme_path()]
html_static_path = ["_static"]
html_title = "azee {}".format(version)
