"""Trace functions over prime fields, Kloosterman sums, ideal-lattice
counting and Hecke-eigenvalue twist experiments."""

from tracefn.ff_core import PrimeField, additive_character, dlog, mult_character
from tracefn.trace_zoo import (
    TraceFunction,
    make_additive,
    make_kloosterman,
    make_legendre,
    make_mult,
    make_trivial,
    mult_convolve,
    pointwise_product,
    pullback,
)
from tracefn.fourier_corr import (
    MobiusMap,
    correlate,
    fm_scan,
    fourier,
    gamma_correlation,
    gamma_family_correlation,
    mobius_apply,
)
from tracefn.kloosterman_ring import kl_ring, kl_unit_twist
from tracefn.kernel_spec import build as build_kernel, parse_kernel
from tracefn.cusp import CuspFormCoeffs, amplifier_weights, extend_tau
from tracefn.lattice import IdealLattice, NumberFieldSpec, lattice_sum
from tracefn.twist import Window, exponent_fit, run_twist, twisted_sum

__version__ = "0.1.0"

__all__ = [
    "PrimeField",
    "additive_character",
    "dlog",
    "mult_character",
    "TraceFunction",
    "make_additive",
    "make_kloosterman",
    "make_legendre",
    "make_mult",
    "make_trivial",
    "mult_convolve",
    "pointwise_product",
    "pullback",
    "MobiusMap",
    "correlate",
    "fm_scan",
    "fourier",
    "gamma_correlation",
    "gamma_family_correlation",
    "mobius_apply",
    "kl_ring",
    "kl_unit_twist",
    "build_kernel",
    "parse_kernel",
    "CuspFormCoeffs",
    "amplifier_weights",
    "extend_tau",
    "IdealLattice",
    "NumberFieldSpec",
    "lattice_sum",
    "Window",
    "exponent_fit",
    "run_twist",
    "twisted_sum",
]
