"""Exact piecewise-linear toolkit for ReLU networks.

Networks, PWL functions and zonotopes are plain dicts in the same JSON formats
the ``reluexact`` command-line tool reads and writes (``relu-net-v1``,
``pwl-v1``, ``zonotope-v1``). Rationals inside them are "num/den" strings;
``to_fraction`` turns one into a ``fractions.Fraction``.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Iterable, Sequence

from . import _reluexact as _core
from ._reluexact import BudgetExceeded, InvariantViolation, ValidationError

__all__ = [
    "BudgetExceeded",
    "InvariantViolation",
    "ValidationError",
    "to_fraction",
    "sawtooth_net",
    "sawtooth_pwl",
    "extract_pwl",
    "from_pwl_2layer",
    "pwl_eval",
    "forward",
    "compose_nets",
    "add_nets",
    "max_nets",
    "random_network",
    "count_regions",
    "zonotope_vertices",
    "zonotope_support",
    "support_net",
    "zonotope_family_net",
    "random_zonotope",
    "enumerate_dichotomies",
    "train_global",
    "train_global_1d",
    "fit_pwl_1d",
    "empirical_loss",
]


def to_fraction(value) -> Fraction:
    return Fraction(value)


def _q(value) -> str:
    return str(Fraction(value))


def _dumps(obj: dict) -> str:
    return json.dumps(obj)


def sawtooth_net(w: int, k: int, M="1") -> dict:
    return json.loads(_core.sawtooth_net(w, k, _q(M)))


def sawtooth_pwl(w: int, k: int, M="1") -> dict:
    return json.loads(_core.sawtooth_pwl(w, k, _q(M)))


def extract_pwl(net: dict) -> dict:
    return json.loads(_core.extract_pwl(_dumps(net)))


def from_pwl_2layer(f: dict) -> dict:
    return json.loads(_core.from_pwl_2layer(_dumps(f)))


def pwl_eval(f: dict, x) -> Fraction:
    return Fraction(_core.pwl_eval(_dumps(f), _q(x)))


def forward(net: dict, x: Iterable) -> list[Fraction]:
    return [Fraction(v) for v in _core.forward(_dumps(net), [_q(v) for v in x])]


def compose_nets(outer: dict, inner: dict) -> dict:
    return json.loads(_core.compose_nets(_dumps(outer), _dumps(inner)))


def add_nets(f: dict, g: dict) -> dict:
    return json.loads(_core.add_nets(_dumps(f), _dumps(g)))


def max_nets(nets: Sequence[dict]) -> dict:
    return json.loads(_core.max_nets([_dumps(n) for n in nets]))


def random_network(seed: int, n: int, widths: Sequence[int]) -> dict:
    return json.loads(_core.random_network(seed, n, list(widths)))


def count_regions(net: dict, box=None, threads: int = 1, max_cells: int = 200000) -> tuple[int, int]:
    """(cells, pieces) over [lo, hi]^n when ``box=(lo, hi)``, else over all of R^n."""
    b = None if box is None else (_q(box[0]), _q(box[1]))
    return _core.count_regions(_dumps(net), b, threads, max_cells)


def zonotope_vertices(z: dict) -> list[list[Fraction]]:
    return [[Fraction(c) for c in v] for v in _core.zonotope_vertices(_dumps(z))]


def zonotope_support(z: dict, r: Iterable) -> Fraction:
    return Fraction(_core.zonotope_support(_dumps(z), [_q(v) for v in r]))


def support_net(z: dict) -> dict:
    return json.loads(_core.support_net(_dumps(z)))


def zonotope_family_net(z: dict, w: int, k: int) -> dict:
    return json.loads(_core.zonotope_family_net(_dumps(z), w, k))


def random_zonotope(seed: int, n: int, m: int) -> dict:
    return json.loads(_core.random_zonotope(seed, n, m))


def _points(x) -> list[list[float]]:
    return [[float(c) for c in (p if isinstance(p, (list, tuple)) else [p])] for p in x]


def enumerate_dichotomies(x) -> list[list[int]]:
    """Positive index sets of every separable split of the points."""
    return _core.enumerate_dichotomies(_points(x))


def train_global(x, y, width: int = 1, loss: str = "squared", **kw) -> dict:
    return json.loads(_core.train_global(_points(x), [float(v) for v in y], width, loss, **kw))


def train_global_1d(x, y, width: int = 1, loss: str = "squared", **kw) -> dict:
    return json.loads(_core.train_global_1d(_points(x), [float(v) for v in y], width, loss, **kw))


def fit_pwl_1d(x, y, width: int = 1, loss: str = "squared", **kw) -> dict:
    return json.loads(_core.fit_pwl_1d(_points(x), [float(v) for v in y], width, loss, **kw))


def empirical_loss(net: dict, x, y, loss: str = "squared") -> float:
    return _core.empirical_loss(_dumps(net), _points(x), [float(v) for v in y], loss)
