"""Figure renderer for the dicke-chaos data files.

Consumes only the CSV/JSON artifacts written by the ``dicke`` CLI; no
numerical recomputation happens here, so every figure is an audit of the
data files rather than of the renderer.
"""

from .io import SchemaError
from .figures import FigureSpec, KINDS, render

__version__ = "0.1.0"

__all__ = ["FigureSpec", "KINDS", "SchemaError", "render"]
