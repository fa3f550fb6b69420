"""Exact combinatorics and numerical checks for the complex (MM^dagger)^p matrix model."""
from ._backend import BACKEND
from .borel import (
    BorelSeries,
    DomainSpec,
    borel_leroy_transform,
    fit_sigma,
    in_domain,
    inverse_borel_quadrature,
    remainder_envelope,
)
from .combinatorics import IntegerPartition, Permutation, cycle_type, enumerate_partitions, enumerate_symmetric_group
from .corner_calculus import (
    CornerWord,
    DecoratedTree,
    count_faa_terms,
    cycles_of,
    differentiate_trace,
    enumerate_decorations,
    mainamp_bound,
    tree_cumulant_bound,
)
from .lvr_kernel import (
    fuss_catalan_numbers,
    matrix_A,
    sigma_and_resolvent,
    tp_cardano,
    tp_eval,
    tp_series_eval,
)
from .ratfunc import RationalFunctionOfN
from .ribbon import (
    RibbonGraph,
    enumerate_ribbon_graphs,
    euler_characteristic,
    invariant_cumulant_series,
    logz_series,
    scalar_cumulant_series,
)
from .series import LambdaSeries
from .weingarten import haar_moment, weingarten_eval, weingarten_symbolic, weingarten_table

logZ_series = logz_series

__version__ = "0.1.0"
