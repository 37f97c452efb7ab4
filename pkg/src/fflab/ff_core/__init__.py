from fractions import Fraction as ExactRational

from .field import FieldElement, PrimeModulus, is_prime, mobius, prime_factors
from .partition import Partition, partitions_of
from .poly import (ExtensionField, PolyOverFp, irreducible_count, is_irreducible,
                   monic_irreducibles)
from .qproduct import BoundedValue, fraction_to_decimal, q_pochhammer

__all__ = [
    "ExactRational", "FieldElement", "PrimeModulus", "is_prime", "mobius", "prime_factors",
    "Partition", "partitions_of", "ExtensionField", "PolyOverFp", "irreducible_count",
    "is_irreducible", "monic_irreducibles", "BoundedValue", "fraction_to_decimal",
    "q_pochhammer",
]
