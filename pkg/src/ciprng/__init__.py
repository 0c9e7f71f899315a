"""Pseudorandom generation by chaotic iterations of Boolean maps.

Submodules:

- ``xorlike``: Marsaglia xorshift, xor128 and xorwow generators
- ``chaotic``: Boolean maps, chaotic iterations and the sequential generator
- ``verifier`` and ``metric``: iteration graphs, Markov matrices, phase-space metric and witnesses
- ``kernels`` and ``bbs``: CPU simulations of the GPU kernels
- ``bg`` and ``reduction``: toy Blum-Goldwasser encryption and the cumulative-XOR construction
- ``stats`` and ``stream``: statistical battery, stream emission, throughput
"""

from .chaotic import BooleanFunction, CiSequentialState, iterate
from .errors import (CertificateError, CiprngError, ConfigurationError, DecodeError,
                     DomainError, KeyLeakError, PaddingError, ResourceError)
from .stream import make_generator

__version__ = "0.1.0"

__all__ = [
    "BooleanFunction", "CiSequentialState", "iterate", "make_generator",
    "CiprngError", "DomainError", "ConfigurationError", "ResourceError",
    "CertificateError", "KeyLeakError", "DecodeError", "PaddingError",
]
