from .adiabatic import (
    CharacteristicField, build_characteristics, characteristic_tau, crossing_tau0,
    detect_crossing, reconstruct, trace_back,
)
from .adiabatic import solve as solve_adiabatic
from .config import RunConfig, dump_config, parse_config
from .constant import version as __version__
from .diagnostics import (
    DiagnosticsReport, build_report, coherence_map, conservation_residual,
    convergence_study, cross_validate, edge_slopes,
)
from .direct import SolverConfig, evolve_atoms, field_rhs, propagate, step_zeta
from .envelope import (
    Complementary, EnvelopeSpec, Gaussian, LinearRamp, Product, SuperGaussian, Sum,
    Tabulated, TanhStep, sample_envelope,
)
from .errors import (
    Blowup, CrossedCharacteristics, DegeneratePulse, Infeasible, InvalidEnvelope,
    InvalidGrid, IoError, LambdaError, MultivaluedError, NoRoot, NonConvergent,
    NonFinite, NonUnitary, ParseError, ValidationError, WindowExceeded, WindowTooSmall,
)
from .grid import TauGrid, ZetaGrid
from .medium import MediumSpec, ThetaEffectiveK
from .persist import load_result, persist_result
from .pulse import PulseMetrics, pulse_energy, pulse_metrics
from .quantities import adiabaticity_ratio, mixing_angle, photon_invariant
from .scenarios import Scenario, builtin_scenarios, get_scenario, run_scenarios
from .shaping import (
    DesignResult, compression_report, copropagation_lag, design_coupling,
    theta_from_probe,
)
from .state import AtomState, FieldState, SimulationResult, Snapshot
