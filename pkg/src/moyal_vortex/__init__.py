"""Numerical laboratory for the Moyal star product, the nonlocal NLS it
induces, and the noncommutativity-generated radial lattice that traps
vortices at radii growing like sqrt(n)."""

__version__ = "0.1.0"

from .grids import (
    ComplexField2D,
    GridSpec,
    SpectrumField2D,
    forward_transform,
    inverse_transform,
    make_grid,
    power,
    radial_profile,
    sample_radial,
)
from .moyal import (
    LandauCoefficients,
    MoyalParams,
    energy,
    from_landau,
    landau_basis,
    star,
    star_cubic,
    star_landau,
    to_landau,
    wedge,
)
from .states import (
    StationaryParams,
    calibrate_theta,
    laguerre,
    phi_n,
    plateau,
    stationary_residual,
    wall,
)
from .vortex import VortexFit, VortexParams, build_ansatz, fit_ansatz, winding_number
from .reduced import (
    FixedPoint,
    LatticeVariant,
    ModulationState,
    amplitude_width,
    avg_lagrangian,
    evolve_peak,
    fixed_points,
    landau_cell_areas,
    lstar_asymptotic,
    lstar_numeric,
    modulation_residuals,
    peak_rhs,
    pn_potential,
)
from .evolution import (
    DiagnosticsRow,
    EvolutionConfig,
    LandauBackend,
    QuadratureBackend,
    evolve,
    nls_rhs,
    step,
)
