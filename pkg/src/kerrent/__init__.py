"""Cross-Kerr generation of photon-number entangled states.

Coherent signal beams are coupled to a bright coherent probe through cross-Kerr
media; reading the probe phase out post-selects the signal modes onto a fixed
total photon number, giving Bell, W and multinomial k-photon entangled states.
"""

from .errors import (
    AmbiguousOutcomeLabeling,
    ConfigError,
    CutoffOverflow,
    CutoffTooSmall,
    DegenerateReadout,
    GridTooLarge,
    KerrentError,
    ModeMismatch,
    NotApplicable,
    OverlapError,
)
from .homodyne import (
    GaussianQuadrature,
    HomodyneModel,
    IdealProjective,
    OutcomeRecord,
    confusion_matrix,
    distinguishability_check,
    measure,
    pointer_overlap,
)
from .kerr import KerrInteraction, PointerState, apply_kerr, dense_oracle, lift, run_sequence
from .protocol import ProtocolConfig, RunResult, poisson_probability, run_protocol, sweep, weak_probability
from .states import (
    CoherentSpec,
    FockState,
    PoissonCutoff,
    WeakTwoTerm,
    apply_ladder,
    expand_coherent,
    fock,
    inner_product,
    tensor,
    tensor_all,
    vacuum,
)
from .witness import TargetState, WitnessReport, build_target, fidelity, moments, witness

__version__ = "0.1.0"
