"""Seeded generation of localized networks.

Pipeline per attempt: uniform scatter of n nodes in a 4L x L rectangle,
pairwise link sampling from the communication model over true distances,
Gaussian localization error, optional long-link removal by apparent
length, then a connectivity check; disconnected draws are discarded and
counted.

Reproducibility: every random draw comes from PCG64 seeded with the tuple
(seed, attempt, purpose[, retry]), purposes 0=scatter 1=links 2=error, so
changing one experimental factor (say sigma_err) leaves the other
substreams untouched.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from itertools import count

import numpy as np
from scipy.spatial.distance import pdist

from .errors import ConnectivityExhausted
from .geometry import BoundingBox, Point2, default_box
from .netgraph import CommGraph

_SCATTER, _LINKS, _ERROR = 0, 1, 2


@dataclass(frozen=True)
class RandomModel:
    """Distance-independent link probability."""
    p: float

    name = "random"

    def __post_init__(self):
        if not 0.0 < self.p <= 1.0:
            raise ValueError("p must be in (0, 1]")


@dataclass(frozen=True)
class SinrModel:
    """Certain link below range r, impossible beyond R, rational in between."""
    r: float
    R: float

    name = "sinr"

    def __post_init__(self):
        if not 0.0 < self.r < self.R:
            raise ValueError("need 0 < r < R")


@dataclass(frozen=True)
class ExponentialModel:
    """Link probability exp(-d / r_avg)."""
    r_avg: float

    name = "exponential"

    def __post_init__(self):
        if self.r_avg <= 0.0:
            raise ValueError("r_avg must be positive")


Model = RandomModel | SinrModel | ExponentialModel


def link_probability(model: Model, d: float) -> float:
    if d < 0:
        raise ValueError("distance must be nonnegative")
    return float(_link_probs(model, np.asarray([d], dtype=float))[0])


def _link_probs(model: Model, d: np.ndarray) -> np.ndarray:
    if isinstance(model, RandomModel):
        return np.full_like(d, model.p)
    if isinstance(model, SinrModel):
        r, R = model.r, model.R
        with np.errstate(divide="ignore"):
            p = (1.0 / d ** 2 - 1.0 / R ** 2) / (1.0 / r ** 2 - 1.0 / R ** 2)
        p = np.where(d <= r, 1.0, p)
        p = np.where(d >= R, 0.0, p)
        return np.clip(p, 0.0, 1.0)
    if isinstance(model, ExponentialModel):
        return np.exp(-d / model.r_avg)
    raise TypeError(f"unknown model {model!r}")


@dataclass(frozen=True)
class GenParams:
    L: float
    model: Model
    n: int | None = None
    sigma_err: float = 0.0
    max_apparent_range: float | None = None
    max_attempts: int = 1000

    def __post_init__(self):
        if self.L <= 0:
            raise ValueError("L must be positive")
        if self.n is None:
            object.__setattr__(self, "n", round(4 * self.L * self.L))
        if self.n < 2:
            raise ValueError("need at least 2 nodes")
        if self.sigma_err < 0:
            raise ValueError("sigma_err must be nonnegative")
        if self.max_apparent_range is not None and self.max_apparent_range <= 0:
            raise ValueError("max_apparent_range must be positive")
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be >= 1")

    @property
    def rect(self) -> BoundingBox:
        return BoundingBox(Point2(0.0, 0.0), Point2(4 * self.L, self.L))


@dataclass(frozen=True)
class LocalizedNetwork:
    true_positions: tuple[Point2, ...]
    apparent_positions: tuple[Point2, ...]
    graph: CommGraph
    gen_params: GenParams | None
    seed: int
    discarded_attempts: int = 0

    @property
    def n(self) -> int:
        return self.graph.n

    def deployment_rect(self) -> BoundingBox | None:
        return self.gen_params.rect if self.gen_params is not None else None

    def routing_box(self, margin_factor: float = 2.0) -> BoundingBox:
        """Bounding box for subdivisions over the apparent positions."""
        return default_box(self.apparent_positions,
                           rect=self.deployment_rect(),
                           margin_factor=margin_factor)


def _rng(seed: int, attempt: int, purpose: int, retry: int = 0):
    seq = np.random.SeedSequence((seed, attempt, purpose, retry))
    return np.random.Generator(np.random.PCG64(seq))


def _scatter(params: GenParams, seed: int, attempt: int) -> np.ndarray:
    for retry in count():
        rng = _rng(seed, attempt, _SCATTER, retry)
        pts = rng.random((params.n, 2))
        pts[:, 0] *= 4 * params.L
        pts[:, 1] *= params.L
        if len(np.unique(pts, axis=0)) == params.n:
            return pts
    raise AssertionError("unreachable")


def _apply_error(true_pos: np.ndarray, sigma: float, seed: int,
                 attempt: int) -> np.ndarray:
    if sigma == 0.0:
        return true_pos.copy()
    for retry in count():
        rng = _rng(seed, attempt, _ERROR, retry)
        theta = rng.random(len(true_pos)) * math.pi
        radius = rng.normal(0.0, sigma, len(true_pos))
        out = true_pos + radius[:, None] * np.column_stack(
            (np.cos(theta), np.sin(theta)))
        if len(np.unique(out, axis=0)) == len(true_pos):
            return out
    raise AssertionError("unreachable")


def inject_error(positions, sigma_err: float, seed: int) -> list[Point2]:
    """Displace each position by a signed Gaussian radius along a uniform
    [0, pi) direction; sigma_err = 0 returns the input unchanged."""
    if sigma_err < 0:
        raise ValueError("sigma_err must be nonnegative")
    pts = np.asarray([(float(p[0]), float(p[1])) for p in positions])
    out = _apply_error(pts, sigma_err, int(seed), 0)
    return [Point2(float(x), float(y)) for x, y in out]


def _generate_once(params: GenParams, seed: int,
                   attempt: int) -> LocalizedNetwork:
    n = params.n
    true_pos = _scatter(params, seed, attempt)
    d = pdist(true_pos)
    probs = _link_probs(params.model, d)
    rng = _rng(seed, attempt, _LINKS)
    u = rng.random(len(d))
    mask = u < probs
    iu, ju = np.triu_indices(n, k=1)
    graph = CommGraph.from_edges(n, zip(iu[mask], ju[mask]))
    apparent = _apply_error(true_pos, params.sigma_err, seed, attempt)
    net = LocalizedNetwork(
        true_positions=tuple(Point2(float(x), float(y)) for x, y in true_pos),
        apparent_positions=tuple(Point2(float(x), float(y)) for x, y in apparent),
        graph=graph,
        gen_params=params,
        seed=seed,
    )
    if params.max_apparent_range is not None:
        net = remove_long_links(net, params.max_apparent_range)
    return net


def generate(params: GenParams, seed) -> LocalizedNetwork:
    """Generate a connected network, discarding disconnected draws."""
    seed = int(seed)
    for attempt in range(params.max_attempts):
        net = _generate_once(params, seed, attempt)
        if net.graph.is_connected():
            return replace(net, discarded_attempts=attempt)
    raise ConnectivityExhausted(params.max_attempts)


def remove_long_links(net: LocalizedNetwork,
                      max_apparent_range: float) -> LocalizedNetwork:
    """Drop edges whose apparent-position length exceeds the bound.

    The result may be disconnected; callers re-check connectivity.
    """
    if max_apparent_range <= 0:
        raise ValueError("max_apparent_range must be positive")
    ap = net.apparent_positions
    kept = []
    for u, v in net.graph.edges():
        dx = ap[u].x - ap[v].x
        dy = ap[u].y - ap[v].y
        if math.hypot(dx, dy) <= max_apparent_range:
            kept.append((u, v))
    graph = CommGraph.from_edges(net.graph.n, kept)
    return replace(net, graph=graph)
