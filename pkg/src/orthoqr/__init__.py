"""Two-stage block Householder orthogonalization toolkit.

Orthogonalize a dense block against an already-orthonormal block through
generalized block reflectors, with stability independent of the input's
conditioning; includes weighted-inner-product variants, classical
baselines, adversarial matrix generators, and an experiment harness.
"""

from .baselines import (
    BaselineSpec,
    bcgs2_block,
    bcgs_two_stage,
    bmgs_inter,
    cholqr_two_stage,
)
from .core import (
    EPS,
    QRPair,
    cholesky,
    cond2,
    householder_qr,
    polar,
    shifted_cholesky_qr,
    spectral_norm,
    tri_solve,
)
from .errors import (
    BreakdownError,
    ConstructionError,
    ConvergenceError,
    DimensionError,
    IntraFailure,
    IoError,
    NormBoundError,
    NotHermitian,
    NotPositiveDefinite,
    OrthoError,
    OrthonormalityError,
    ParameterError,
    SingularError,
    SingularTError,
)
from .experiments import run_experiment, timing_mode
from .metrics import StabilityReport, compute_metrics
from .mtxt import read_mtxt, write_mtxt
from .oblique import (
    BGenHouseholder,
    InnerProduct,
    b_apply_reflector,
    b_block_householder_qr,
    b_build_reflector,
    b_householder_qr,
    b_two_stage_qr,
    initial_b_basis,
)
from .reflector import (
    GenHouseholder,
    MLUResult,
    ReflectorDiagnostics,
    apply_reflector,
    build_reflector,
    modified_lu,
    reflector_diagnostics,
)
from .testgen import (
    AdversarialPair,
    fixture_badbcg,
    gen_cond_general,
    gen_family,
    gen_mlu_adversarial,
    gen_mlu_adversarial_from_r,
    gen_prescribed_kappa_t,
    gen_random_orthonormal,
    gen_spd,
    mlu_target_upper,
)
from .twostage import (
    BlockQRResult,
    TwoStageResult,
    block_householder_qr,
    reorthogonalized_two_stage,
    two_stage_qr,
)

__version__ = "0.1.0"
