"""Group-valued flows and colorings on multigraphs: exact deciders, constructive solvers, certificates."""

from .abelian import FiniteAbelianGroup, choose_simple_sum_basis, enumerate_groups_of_order, parse_group_spec
from .decide import (
    BudgetExceeded,
    Certificate,
    ForbiddenMap,
    exists_flow_avoiding,
    is_group_colorable,
    is_group_connected,
    verify_coloring,
    verify_flow,
)
from .kernels import BACKEND
from .multigraph import Multigraph, gen_theta

__version__ = "0.1.0"
