"""Reeb dynamics, ECH index bookkeeping and generator enumeration for
toric contact forms on S1 x S2."""

from __future__ import annotations

import os as _os

# must run before numpy is first imported
_threads = _os.environ.get("ECH_S1S2_THREADS")
if _threads:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS", "NUMEXPR_NUM_THREADS"):
        _os.environ.setdefault(_var, _threads)

from .surd import QSqrt6, exact_floor, mod_one  # noqa: E402
from .poly import Poly  # noqa: E402
from .profile import FormProfile, LAMBDA0, morse_bott_catalog, exceptional_rotation  # noqa: E402
from .perturb import ReebOrbit, OrbitCatalog, bourgeois_split, build_lambda_A, twisted_catalog  # noqa: E402
from .index import FormalCurveComponent, End, ech_index, fredholm_index, cz  # noqa: E402
from .generators import enumerate_generators, epsilon_sign, tensor_ordering_sign  # noqa: E402

__version__ = "0.1.0"

__all__ = [
    "QSqrt6",
    "exact_floor",
    "mod_one",
    "Poly",
    "FormProfile",
    "LAMBDA0",
    "morse_bott_catalog",
    "exceptional_rotation",
    "ReebOrbit",
    "OrbitCatalog",
    "bourgeois_split",
    "build_lambda_A",
    "twisted_catalog",
    "FormalCurveComponent",
    "End",
    "ech_index",
    "fredholm_index",
    "cz",
    "enumerate_generators",
    "epsilon_sign",
    "tensor_ordering_sign",
]
