"""Hankel transforms, Bessel hypergroup convolutions, and heat kernels on
the associated solvable extension of the half-line."""

from .errors import (
    DomainError,
    HankelHeatError,
    IllConditioned,
    Instability,
    NonConvergent,
    ResampleError,
)
from .specfun import Order, arccosh_stable, bessel_j, j_kernel
from .quadrature import (
    HalfLineGrid,
    PlaneGrid,
    QuadratureSpec,
    build_grid,
    build_plane_grid,
    integrate_halfline,
    integrate_oscillatory,
)

from .halfline import (
    DeltaMeasure,
    DeltaPair,
    RadialProfile,
    bessel_heat_kernel,
    bessel_multiplier_kernel,
    delta_convolve,
    hankel_convolve,
    hankel_inverse,
    hankel_transform,
    hankel_translate,
    load_profile,
    resample,
    save_profile,
)
from .geometry import (
    GPoint,
    KernelField,
    ball_indicator,
    distance,
    g_convolve,
    group_norm,
    involution,
    left_translate,
    load_field,
    modular,
    radial_integrate,
    radial_integrate_plane,
    right_translate,
    save_field,
    weighted_ball_bound,
)
from .calculus import (
    ExpMixMultiplier,
    PlancherelEstimate,
    T_MIN,
    estimate_plancherel,
    g_heat_kernel,
    m_function,
    multiplier_kernel,
    project_to_expmix,
    psi_eval,
    transference_multiplier,
)
from .verify import (
    CheckReport,
    WaveState,
    format_report,
    gaussian_cutoff_bump,
    make_wave_state,
    propagation_report,
    run_suite,
    summary_table,
    wave_energy,
    wave_run,
    wave_step,
)

__version__ = "0.1.0"
