"""Numerics for weighted Bergman spaces on tube domains over symmetric cones.

Subpackages/modules:
  cone     -- Euclidean Jordan algebra primitives (determinant, minors, spectra)
  tube     -- tube points, complexified determinant powers, Bergman kernels,
              kernel-constant calibration, the generalized wave operator
  quad     -- quadrature engines over cones / base space / tubes, exponent
              fitting, divergence classification
  spaces   -- probe functions, mixed norms, product norms, Herz quasinorm,
              duality pairing, projection range formulas
  ops      -- Bergman projection and the Bergman-type integral operators
  lattice  -- invariant cone distance, Bergman-type balls, r-lattices,
              sampling norms, atomic decomposition
  harness  -- verification suites and the command line interface
"""

from . import cone, errors, lattice, ops, quad, spaces, tube
from . import harness

__all__ = ["cone", "errors", "harness", "lattice", "ops", "quad", "spaces", "tube"]
__version__ = "0.1.0"
