"""Force control design and simulation for a cable-driven series elastic actuator."""
from .errors import *  # noqa: F401,F403
from .lti import (
    DiscreteStateSpace,
    StateSpace,
    TransferFunction,
    dc_gain,
    discretize_tustin,
    discretize_zoh,
    freq_response,
    tf_new,
    to_statespace,
)
from .metrics import StepMetrics, control_energy, step_metrics, tracking_rms
from .poly import Polynomial, is_hurwitz, paraconjugate, poly_mul, roots, spectral_factor
from .sea_model import SeaParams, motor_tf, plant_tf
from .simulation import (
    ExplicitController,
    ReferenceSpec,
    ScenarioConfig,
    SimTrace,
    TwoDofSpec,
    gaussian_noise,
    make_reference,
    run_closed_loop,
)
from .synthesis import (
    PidGains,
    TwoDofController,
    closed_loop,
    design_2dof,
    pid_controller,
    verify_internal_stability,
)

__version__ = "0.1.0"
