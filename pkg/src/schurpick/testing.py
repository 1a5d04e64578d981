"""Random problem generators used by the test suite and for experimentation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .parametrize import pole_moduli
from .pickdata import ProblemData, build_pick_system, extract_jet
from .ratfun import RationalFunction, blaschke

__all__ = ["RandomSystem", "random_blaschke", "random_nodes", "random_system", "random_suite"]


@dataclass(frozen=True)
class RandomSystem:
    """A generated problem together with the function its jets came from."""

    data: ProblemData
    source: RationalFunction
    deltas: tuple


def random_blaschke(rng: np.random.Generator, degree: int, max_radius: float = 0.8) -> RationalFunction:
    """Blaschke product with zeros uniform (by area) in ``|z| <= max_radius`` and a random phase."""
    r = max_radius * np.sqrt(rng.random(degree))
    zeros = r * np.exp(2j * np.pi * rng.random(degree))
    return blaschke(zeros, np.exp(2j * np.pi * rng.random()))


def random_nodes(rng: np.random.Generator, k: int, min_sep: float = 0.3) -> np.ndarray:
    """``k`` points on the circle whose angles differ by at least ``min_sep``."""
    while True:
        th = np.sort(2 * np.pi * rng.random(k))
        gaps = np.diff(np.concatenate([th, [th[0] + 2 * np.pi]]))
        if k == 1 or gaps.min() >= min_sep:
            return np.exp(1j * th)


def random_system(
    rng: np.random.Generator,
    max_nodes: int = 3,
    max_order: int = 2,
    max_size: int = 8,
    max_degree: int = 5,
    cond_floor: float = 1e-6,
    pole_margin: float = 0.02,
    max_tries: int = 1000,
) -> RandomSystem:
    """A nonsingular admissible problem built from a random Blaschke product.

    Jets are extracted exactly, then every ``gamma_i`` is raised by
    ``delta_i ~ U[0, 1]``.  Draws are rejected and redrawn when the Pick
    matrix has smallest eigenvalue below ``cond_floor * ||P||`` or when the
    coefficient matrix has a pole within ``pole_margin`` of the closed disk.
    The second filter bounds how strongly rounding in the data is amplified
    in the highest jet coefficient at a node.
    """
    for _ in range(max_tries):
        k = int(rng.integers(1, max_nodes + 1))
        ns = [int(x) for x in rng.integers(0, max_order + 1, size=k)]
        N = sum(n + 1 for n in ns)
        lo = max(1, N - k)
        if N > max_size or lo > max_degree:
            continue
        B = random_blaschke(rng, int(rng.integers(lo, max_degree + 1)))
        deltas = tuple(float(x) for x in rng.random(k))
        nodes = [extract_jet(B, t, n).inflated(d) for t, n, d in zip(random_nodes(rng, k), ns, deltas)]
        data = ProblemData(tuple(nodes))
        sys = build_pick_system(data)
        lam = np.linalg.eigvalsh((sys.P + sys.P.conj().T) / 2)
        if lam[0] < cond_floor * np.abs(lam).max():
            continue
        if pole_margin > 0 and pole_moduli(sys).min() < 1 + pole_margin:
            continue
        return RandomSystem(data, B, deltas)
    raise RuntimeError("could not draw a well-conditioned system")


def random_suite(count: int = 50, seed: int = 20261015, **kw) -> list:
    """``count`` independent draws of :func:`random_system` from one seed."""
    rng = np.random.default_rng(seed)
    return [random_system(rng, **kw) for _ in range(count)]
