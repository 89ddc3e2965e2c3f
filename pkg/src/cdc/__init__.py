"""Numerical checks of BMO/H1 duality for reversible Markov semigroups and group algebras."""

from __future__ import annotations

import os

__version__ = "0.1.0"

# BLAS threads must be pinned before numpy loads; CDC_THREADS overrides the default of 1
_threads = os.environ.get("CDC_THREADS", "1")
for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
    os.environ.setdefault(_var, _threads)

from .errors import CdcError, ConfigError, CurvatureFailed, GeneratorError  # noqa: E402
from .gamma import check_curvature, gamma, gamma2  # noqa: E402
from .groups import FiniteGroup, GroupAlgebra, make_group, make_psi  # noqa: E402
from .norms import BMO_norm, bmo_norm, h1_norms, jn_norm  # noqa: E402
from .poisson import CarlesonMeasure, PoissonSemigroup, carleson_norm  # noqa: E402
from .semigroup import Generator, SpectralDecomposition, TimeGrid, decompose  # noqa: E402
from .zoo import family, load_generator, make_generator  # noqa: E402

__all__ = [
    "BMO_norm", "CarlesonMeasure", "CdcError", "ConfigError", "CurvatureFailed", "FiniteGroup",
    "Generator", "GeneratorError", "GroupAlgebra", "PoissonSemigroup", "SpectralDecomposition",
    "TimeGrid", "bmo_norm", "carleson_norm", "check_curvature", "decompose", "family", "gamma",
    "gamma2", "h1_norms", "jn_norm", "load_generator", "make_generator", "make_group", "make_psi",
]
