"""Lipschitz maps and tree homomorphisms on Baire and Cantor space."""

from .prefix_core import BINARY, INFINITE, OMEGA, Alphabet, Point, WordTree, distance
from .lipschitz_maps import PartialMap, TreeHom, check_isometry, check_lipschitz

__version__ = "0.1.0"
