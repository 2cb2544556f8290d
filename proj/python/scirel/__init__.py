"""Relation extraction toolkit for scientific text.

Thin Python layer over the C++ core: standoff parsing, preprocessing,
argument-ordering strategies, the CNN classifier, rule-based postprocessing
and scoring.
"""

try:
    from scirel._scirel import *  # noqa: F401,F403
    from scirel._scirel import __doc__ as _core_doc  # noqa: F401
except ImportError:  # running from a build tree with the module on PYTHONPATH
    from _scirel import *  # noqa: F401,F403

__version__ = "0.1.0"
