"""btlab: exact computation in balls of affine buildings over truncated valuation rings.

The pieces, bottom to top:

  fields    -- classification data (p, f, e, delta, r) for non-archimedean
               local fields, validation, and the closeness radius between
               two fields (largest R with isomorphic depth-R residue rings).
  rings     -- finite chain rings O_R with exact arithmetic (equal
               characteristic, Galois, Eisenstein and skew presentations),
               Frobenius lifts, ring-isomorphism search.
  lattices  -- Howell-style canonical forms, membership and enumeration for
               submodules of (O_R)^d.
  ball      -- the radius-R ball of the type A~_{d-1} building as a typed
               graph: adjacency, type labels, distances.
  geometry  -- Coxeter diagrams, flags, residues, generalized m-gon tests
               and verification of the geometry axioms.
  germs     -- local labellings (germs), transport along edges, propagation
               from a basepoint with holonomy obstructions.
  canon     -- canonical forms and isomorphism testing for finite graphs.
  cli       -- command line front end and the experiment runner.

Everything is pure and deterministic; ring elements, module reps and graphs
are immutable values, safe to share across threads.
"""

from btlab.errors import BudgetExceeded, InvalidDescriptor, InvalidInput
from btlab.fields import INFINITY, FieldDescriptor, closeness, parse_descriptor, positive_char_limit, validate_descriptor
from btlab.rings import build_residue_ring, equal_char_collapse_witness, frobenius_lift, rings_isomorphic

__version__ = "0.1.0"
