"""Computational toolkit for smooth subalgebras of reduced group C*-algebras of hyperbolic groups."""
from hypsmooth.group_kernel import (
    BallTable,
    CapExceeded,
    GeneratorAlphabet,
    Group,
    GroupError,
    GroupSpec,
    InvariantError,
    UnknownLetter,
)
from hypsmooth.group_ring import FormElement, RingElement, TensorElement
from hypsmooth.norms import BoundCertificate, SeminormSpec

__all__ = [
    "BallTable",
    "BoundCertificate",
    "CapExceeded",
    "FormElement",
    "GeneratorAlphabet",
    "Group",
    "GroupError",
    "GroupSpec",
    "InvariantError",
    "RingElement",
    "SeminormSpec",
    "TensorElement",
    "UnknownLetter",
]
__version__ = "0.1.0"
