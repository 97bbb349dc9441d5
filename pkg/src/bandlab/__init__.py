"""Band structure of 2D Schroedinger operators with square-lattice symmetry near the M point."""

from .hamiltonian import NumericalError

__all__ = ["NumericalError"]
__version__ = "0.1.0"
