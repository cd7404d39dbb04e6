"""Modal analysis of elastic wave scattering by small negative-contrast spheres.

Set ``ELASTOMODE_THREADS`` before import to cap BLAS/OpenMP threads.
"""
import os

_threads = os.environ.get("ELASTOMODE_THREADS")
if _threads:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(_var, _threads)

from .errors import *  # noqa: E402,F401,F403
from .media import ElasticMedium, Quasiparticle, SourceSpec, contrast, validate_medium  # noqa: E402
from .sphere_basis import ModeIndex, SphereGrid, mode_indices, normalize_basis  # noqa: E402

__version__ = "0.1.0"

__all__ = [
    "ElasticMedium",
    "Quasiparticle",
    "SourceSpec",
    "contrast",
    "validate_medium",
    "ModeIndex",
    "SphereGrid",
    "mode_indices",
    "normalize_basis",
]
