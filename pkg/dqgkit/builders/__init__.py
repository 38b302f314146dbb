from .commutative import build_commutative, commutative_spec, convolution_oracle
from .cycles import CYCLE_KINDS, point_cycle, trivial_cycle
from .group_dual import build_group_dual, fourier_transform, group_dual_spec, group_element
from .groups import (
    NAMED_GROUPS,
    TRIVIAL,
    GroupIrreps,
    GroupTable,
    cyclic,
    irreps_by_averaging,
    load_group,
    symmetric3,
    validate_table,
)
from .intertwiners import intertwiner_space, isotypic_isometry, nullspace, transpose_conjugation
from .suq2 import build_suq2_window, generators, qint, spin_label, suq2_spec
