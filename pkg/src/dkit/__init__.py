"""Analysis toolkit for singular (descriptor) linear discrete-time systems.

Core surface:

* pencils and spectra     -- :mod:`dkit.pencil`
* canonical form          -- :mod:`dkit.weierstrass`
* closed-form solutions   -- :mod:`dkit.solver`
* causality analysis      -- :mod:`dkit.causality`
* command-line front-end  -- :mod:`dkit.cli`
"""

from .causality import (
    CausalityReport,
    brute_force_causality_oracle,
    build_report,
    check_output_causality,
    check_output_causality_nullspace,
    check_state_causality,
)
from .errors import (
    ChainConstructionFailure,
    DkitError,
    InconsistentInitialCondition,
    InputHorizonTooShort,
    IrregularPencil,
    ParseError,
    UnresolvableSpectrum,
)
from .matrices import Matrix, block_diag, hstack, vstack
from .pencil import CharPoly, Pencil, char_poly, finite_eigenvalues, is_regular
from .scalars import Mode, Scalar, format_scalar, parse_scalar
from .solver import (
    ConsistencyResult,
    DescriptorSystem,
    InputSignal,
    Trajectory,
    TransformedInput,
    check_consistency,
    closed_form_zp,
    compute_Dk,
    residual_oracle,
    solve,
    transform_input,
)
from .weierstrass import (
    JordanBlockSpec,
    NilpotentBlockSpec,
    VerificationReport,
    WeierstrassDecomposition,
    assemble_Hq,
    assemble_Jp,
    decompose,
    verify,
)

__version__ = "0.1.0"

__all__ = [
    "CausalityReport",
    "ChainConstructionFailure",
    "CharPoly",
    "ConsistencyResult",
    "DescriptorSystem",
    "DkitError",
    "InconsistentInitialCondition",
    "InputHorizonTooShort",
    "InputSignal",
    "IrregularPencil",
    "JordanBlockSpec",
    "Matrix",
    "Mode",
    "NilpotentBlockSpec",
    "ParseError",
    "Pencil",
    "Scalar",
    "Trajectory",
    "TransformedInput",
    "UnresolvableSpectrum",
    "VerificationReport",
    "WeierstrassDecomposition",
    "assemble_Hq",
    "assemble_Jp",
    "block_diag",
    "brute_force_causality_oracle",
    "build_report",
    "char_poly",
    "check_consistency",
    "check_output_causality",
    "check_output_causality_nullspace",
    "check_state_causality",
    "closed_form_zp",
    "compute_Dk",
    "decompose",
    "finite_eigenvalues",
    "format_scalar",
    "hstack",
    "is_regular",
    "parse_scalar",
    "residual_oracle",
    "solve",
    "transform_input",
    "verify",
    "vstack",
]
