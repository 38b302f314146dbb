from . import utils as utils
from .abc import AbstractDocument
from .assembly import (
    AssemblyClassRep,
    Coaction,
    CycleRep,
    normalized_cutoff,
    assembly_class,
    coaction_validate,
    compact_witness,
    conv_action,
    cycle_validate,
    f_prime,
    homotopy_check,
)
from .blockalg import (
    BlockIndex,
    Element,
    Functional,
    RepBlockMatrix,
    TensorElement,
    elem_adjoint,
    elem_product,
    tensor_product,
)
from .core import (
    DeltaEntry,
    DqgSpec,
    Multiplier,
    Window,
    antipode,
    counit,
    galois_solve,
    galois_t1,
    galois_t2,
    perturb_isometry,
    verify_bialgebra,
    verify_multiplier_rule,
)
from .corep import (
    Corep,
    FreeModuleVector,
    ModuleVector,
    corep_validate,
    module_act,
    module_inner,
    sigma_map,
    sigma_star,
    verify_module,
)
from .dual import convolve, func_convolve, func_star, left_regular, psi_embed, sharp, verify_dual
from .exceptions import (
    BuilderError,
    CertificateError,
    GroupTableError,
    SpecFormatError,
    StructuralError,
    WindowOverflow,
)
from .formats import SpecDocument, emit_spec, load_spec, parse_spec
from .haar import HaarData, canonical_haar, derive_K_from_S2, modular_data, verify_haar
from .log import logger
from .report import Check, Report
