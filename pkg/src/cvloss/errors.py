"""Exception types shared across the package."""


class UnphysicalCovariance(ValueError):
    """Covariance matrix has a symplectic eigenvalue below the vacuum floor."""


class VacuumSubtraction(ValueError):
    """Photon subtraction attempted from a mode that holds only vacuum.

    The heralding probability vanishes, so the conditioned state is undefined.
    """


class CutoffLeakage(RuntimeError):
    """Truncated Fock-space result is unreliable: too much population in the top layer."""


class ConfigError(ValueError):
    """Run configuration failed schema or semantic validation."""
