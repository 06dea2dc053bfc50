"""Quadratic-sieve smoothness detection on a CPU log sieve and a simulated spiking network."""

from .arith import gen_semiprime, is_prime, smoothness_bound
from .cpu_sieve import cpu_sieve_run
from .postproc import FactorConfig, FactorizationFailed, FactorResult, factor
from .qs import FactorBase, QsPolynomial, SieveInterval, build_factor_base, trial_divide
from .quantize import ConstraintViolation, Strategy, quantize
from .snn import build_network, run_sieve, simulate

__all__ = [
    "ConstraintViolation", "FactorBase", "FactorConfig", "FactorResult", "FactorizationFailed",
    "QsPolynomial", "SieveInterval", "Strategy", "build_factor_base", "build_network",
    "cpu_sieve_run", "factor", "gen_semiprime", "is_prime", "quantize", "run_sieve",
    "simulate", "smoothness_bound", "trial_divide",
]  # fmt: skip
