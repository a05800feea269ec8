"""Coincidences and correlations of multiplicative functions, computed at desk scale."""

from multcoinc.errors import BudgetExceeded, InvalidArgument
from multcoinc.primes import PrimeTable, build_prime_table, factorize, restricted_prime_sum

__all__ = [
    "BudgetExceeded",
    "InvalidArgument",
    "PrimeTable",
    "build_prime_table",
    "factorize",
    "restricted_prime_sum",
]

__version__ = "0.1.0"
