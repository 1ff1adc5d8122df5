"""unipotent-lab: numerics for unipotent flows on SL2(R) x SL2(R) quotients.

Modules:
  algebra     group/Lie-algebra kernels, BCH split, projection families
  quotient    reduction, injectivity radius, Haar sampling, periodic orbits
  flow        translates, equidistribution estimators, nondivergence
  dimension   energies, dyadic regularization, cones, dimension steps
  projection  discretized projection-theorem scans
  margulis    sigma_d averaging, f_Y Margulis functions
  closing     closing-lemma diagnostics
  harness     experiment configs, runners, CSV/JSON artifacts
  acceptance  the acceptance matrix
"""

__version__ = "0.1.0"

from . import (algebra, quotient, flow, dimension, projection, margulis,
               closing, harness, acceptance)  # noqa: F401
