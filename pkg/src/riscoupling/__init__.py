"""Mutual-coupling aware RIS modeling with decoupling networks.

Builds coupled ULA channel models, transforms them into uncoupled-model
form through power-matching decoupling networks, maximizes the SISO
channel gain in closed form for diagonal and fully-connected
architectures, and verifies the super-quadratic array-gain asymptotics
via Legendre-polynomial machinery.
"""

from .coupling import (
    CouplingMatrix,
    ImpedanceMatrix,
    SteeringVector,
    build_coupling_matrix,
    condition_number,
    coupling_real_part,
    inv_sqrt_spd,
    sqrt_spd,
    steering_vector,
    with_ohmic_loss,
)
from .errors import IllConditioned, SchemaError, SingularNetwork
from .network import (
    BDConfig,
    ChannelTriple,
    DecouplingNetwork,
    DiagonalConfig,
    ImpedanceConfig,
    Scenario,
    apply_decoupling,
    assemble_channel,
    bd_equivalent_network,
    effective_channels,
    impedance_to_scattering,
    los_triple,
    power_matching_network,
    scattering_channel,
    scattering_to_impedance,
)
from .optimize import (
    GainResult,
    Method,
    bd_gain,
    closed_form_diagonal_gain,
    conventional_gain_and_gradient,
    gradient_coupled_baseline,
    ignore_mc_baseline,
    optimal_diagonal_phases,
)
from .analysis import (
    LegendreEval,
    MinimumReport,
    TheoremBounds,
    array_gain_bd,
    array_gain_diagonal,
    christoffel_function,
    christoffel_lower_bound,
    christoffel_minimum,
    coupled_gain_limit,
    legendre,
    theorem_bounds,
)
from .kernels import BACKEND as LEGENDRE_BACKEND

__version__ = "0.1.0"
