"""Uniformly finite homology at window scale."""

import json
from fractions import Fraction

from ._ufhom import (
    BeyondWindow,
    Error,
    InvalidArgument,
    VerificationFailure,
    __version__,
    ball_sizes,
    run,
)
from . import _ufhom


def _fractions(rows):
    for row in rows:
        for k, v in row.items():
            if isinstance(v, str) and k not in ("group", "family", "chain"):
                row[k] = Fraction(v)
    return rows


def growth(group, family, j_max, chain=""):
    out = json.loads(_ufhom.growth_json(group, family, j_max, chain))
    _fractions(out["rows"])
    return out


def compare(n, alpha, beta, tolerance=0.05):
    return json.loads(_ufhom.compare_json(list(n), [str(Fraction(a)) for a in alpha],
                                          [str(Fraction(b)) for b in beta], tolerance))


def sparse_build(group, family, j_max):
    return json.loads(_ufhom.sparse_build_json(group, family, j_max))


def thick_build(group, subgroup, n, depth):
    return json.loads(_ufhom.thick_build_json(group, subgroup, n, depth))


def thick_verify(family, window, h_radius=10):
    return json.loads(_ufhom.thick_verify_json(json.dumps(family), window, h_radius))


__all__ = [
    "BeyondWindow", "Error", "InvalidArgument", "VerificationFailure", "__version__",
    "ball_sizes", "compare", "growth", "run", "sparse_build", "thick_build", "thick_verify",
]
