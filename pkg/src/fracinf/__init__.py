"""Numerics for the infinity fractional Laplacian and its evolution problem."""
from importlib.metadata import PackageNotFoundError, version

from .field import AnalyticField, ConstantFarField, GridSpec, SampledField, ScalarField, sample, translate
from .heat1d import build_profile, convolve, kernel_eval
from .operator import OperatorConfig, L_eps, cs_constant, frac_lap_1d, ifl, ifl_minus, ifl_plus, operator_family
from .quad import QuadRule, tail_weight
from .radial import RadialProfile, check_reduction, classical_solution, lift_radial
from .report import VerificationReport
from .scheme import SchemeConfig, evolve

try:
    __version__ = version("artifact")
except PackageNotFoundError:  # pragma: no cover
    __version__ = "0.0.0"

__all__ = [
    "AnalyticField", "ConstantFarField", "GridSpec", "SampledField", "ScalarField", "sample", "translate",
    "build_profile", "convolve", "kernel_eval",
    "OperatorConfig", "L_eps", "cs_constant", "frac_lap_1d", "ifl", "ifl_minus", "ifl_plus", "operator_family",
    "QuadRule", "tail_weight",
    "RadialProfile", "check_reduction", "classical_solution", "lift_radial",
    "VerificationReport", "SchemeConfig", "evolve",
]
