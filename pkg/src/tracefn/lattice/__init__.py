"""Ideal lattices in Q and quadratic fields, and the counting lemmas over them."""

from tracefn.lattice.counting import (
    LatticeSum,
    Profile,
    count_divisor_pairs,
    count_units_in_box,
    divisor_pairs,
    lattice_sum,
    shortest_vector_lower_bound,
    units_in_box,
)
from tracefn.lattice.ideal import IdealLattice
from tracefn.lattice.numberfield import NumberFieldSpec

__all__ = [
    "IdealLattice",
    "LatticeSum",
    "NumberFieldSpec",
    "Profile",
    "count_divisor_pairs",
    "count_units_in_box",
    "divisor_pairs",
    "lattice_sum",
    "shortest_vector_lower_bound",
    "units_in_box",
]
