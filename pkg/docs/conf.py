# -*- coding: utf-8 -*-

from tigris_ipp import __version__

extensions = ["sphinx.ext.autodoc", "sphinx.ext.todo"]
templates_path = ["_templates"]
source_suffix = ".rst"
master_doc = "index"
project = "tigris_ipp"
copyright = "2026, "
version = __version__
release = __version__
exclude_patterns = []
pygments_style = "sphinx"
html_theme = "default"
htmlhelp_basename = "tigris_ippdoc"
latex_documents = [
    ("index", "tigris_ipp.tex", "tigris_ipp Documentation", "", "manual"),
]
man_pages = [("index", "tigris", "tigris_ipp Documentation", [], 1)]
texinfo_documents = [
    (
        "index",
        "tigris_ipp",
        "tigris_ipp Documentation",
        "",
        "tigris_ipp",
        "Informative path planning for fixed-wing camera platforms.",
        "Miscellaneous",
    ),
]
