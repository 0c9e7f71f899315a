"""Exception hierarchy shared by every module of the package."""


class CiprngError(Exception):
    """Base class for all package errors."""


class DomainError(CiprngError, ValueError):
    """An argument lies outside the domain of an operation."""


class ConfigurationError(CiprngError, ValueError):
    """A grid or kernel configuration is inconsistent."""


class ResourceError(CiprngError):
    """An exhaustive analysis was asked for beyond its supported size."""


class CertificateError(CiprngError):
    """A constructive witness could not be built (e.g. no return path)."""


class KeyLeakError(CiprngError, ValueError):
    """Encryption randomness shares a factor with the modulus."""


class DecodeError(CiprngError, ValueError):
    """A ciphertext or stream could not be decoded."""


class PaddingError(CiprngError, ValueError):
    """A message length does not fit the block size."""
