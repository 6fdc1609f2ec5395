"""Class numbers of quadratic and cyclic cubic fields, genus theory, and
successive maxima of the normalized non-genus metric h / sqrt(D)^eps."""

from .arith import Factorization, factorize, is_squarefree, isqrt_exact, kronecker, omega, valuation
from .classnum import (
    QuadraticForm,
    class_number_imaginary,
    class_number_imaginary_oracle,
    narrow_class_number_real,
    reduced_indefinite_forms,
    rho_step,
)
from .cubic import CubicField, class_number_cubic, enumerate_cubic_fields, family_members
from .discriminants import (
    CyclicConductor,
    QuadDiscriminant,
    is_cyclic_conductor,
    is_fundamental,
    iter_fundamental,
    smallest_conductor_with_n_primes,
)
from .genus import GroupSpec, genus_number_cyclic, group_spec, nongenus_part
from .maxima import BucketSpec, FieldRecord, MaximaEvent, ScanRecord, merge_shards, scan
from .metric import Epsilon, MetricValue, c_eps, compare, geometric_mean

__version__ = "0.1.0"

__all__ = [
    "BucketSpec",
    "CubicField",
    "CyclicConductor",
    "Epsilon",
    "Factorization",
    "FieldRecord",
    "GroupSpec",
    "MaximaEvent",
    "MetricValue",
    "QuadDiscriminant",
    "QuadraticForm",
    "ScanRecord",
    "c_eps",
    "class_number_cubic",
    "class_number_imaginary",
    "class_number_imaginary_oracle",
    "compare",
    "enumerate_cubic_fields",
    "factorize",
    "family_members",
    "genus_number_cyclic",
    "geometric_mean",
    "group_spec",
    "is_cyclic_conductor",
    "is_fundamental",
    "is_squarefree",
    "isqrt_exact",
    "iter_fundamental",
    "kronecker",
    "merge_shards",
    "narrow_class_number_real",
    "nongenus_part",
    "omega",
    "reduced_indefinite_forms",
    "rho_step",
    "scan",
    "smallest_conductor_with_n_primes",
    "valuation",
]
