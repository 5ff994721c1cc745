"""Exact finite-stage checks for amenable isometric actions on trees."""

from .scalar import AlgebraicReal, inv_sqrt
from .tree import FreeTree, LineTree
from .group_action import make_action
from .witness import build_witness
from .corona import defect_sq

__all__ = ["AlgebraicReal", "inv_sqrt", "FreeTree", "LineTree", "make_action", "build_witness", "defect_sq"]
