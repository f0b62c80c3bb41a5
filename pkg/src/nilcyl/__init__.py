"""Non-vertical minimal cylinders in the Heisenberg group Nil3 and
spacelike CMC cylinders in Minkowski 3-space via the loop group method.

The pipeline: periodic frame data (a0, b0) and a periodic function h
define an su(1,1)-valued potential; integrating dC = C zeta and
SU(1,1)-Iwasawa-factorizing the frame yields the extended frame, and
Sym-type formulas produce the immersions.  Cylinders correspond to a
pair of closed plane curves (ell, m) enclosing equal signed areas, and
conversely every such pair designs a potential.
"""

__version__ = "0.1.0"

from .fourier import PeriodicFunction, bessel_i0
from .loops import LoopMatrix, SingularLoopError, identity, sigma3_loop
from .potentials import (FrameData, PotentialData, SuPotential, bessel_area,
                         build_zeta, extract_nu_kappa, preset, PRESET_NAMES)
from .curves import (PlaneCurve, alpha_of, beta_of, cmc_inner_condition,
                     ell_of, m_of, signed_area, third_closing_residual)
from .design import (CurvePair, balance_radius, design, h_from, mu_of,
                     split_m)
from .frames import (ClosingReport, FrameField, PointwiseRun, RealAxisRun,
                     X_of, Y_of, closing_report, corollary_XY,
                     integrate_frame, integrate_real_axis,
                     kilian_identity_residual, monodromy, pointwise_run)
from .iwasawa import IwasawaGrid, IwasawaResult, frame_from, iwasawa_decompose
from .sym import (SurfaceMesh, SurfacePoint, closure_residual,
                  mean_curvature_field, minkowski_coords, surface_grid,
                  sym_L3, sym_nil)

__all__ = [name for name in dir() if not name.startswith("_")]
