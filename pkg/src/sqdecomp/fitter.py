"""Direct optimization of superquadric pairs against occupancy labels.

Every tree node solves the same problem: given sample points and binary
inside labels, fit two superquadrics so that the pointwise maximum of their
soft occupancies matches the labels under binary cross-entropy. The loss for
one node is

    L = mean_x BCE(max(g_a(x), g_b(x)), label(x))

optimized by gradient descent with momentum 0.9, a cosine step-size decay,
and projection of sizes/exponents onto their bounds after every step.
Rotations move on the unit-quaternion sphere via the exp-map retraction (see
superquadric module docstring), so no step can leave the manifold.

Multi-restart: the first start is a deterministic PCA/moment init with the
pair offset along the long axis, the next three start the pair coincident
(effectively a single-SQ fit) while cycling the principal-axis roles, and
further starts add seeded noise. The best iterate ever seen (across all
restarts) is returned, so the final loss never exceeds the initial one.

Nodes without a single inside-labeled point get a degenerate sentinel pair
(two minimum-size SQs at the point centroid) and are not optimized; their
children inherit empty label sets and therefore the same treatment.
"""

from __future__ import annotations

import dataclasses
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields

import numpy as np
from scipy.special import expit

from . import quaternions as quat
from .geometry import LabeledPointSet
from .metrics import EmptyUnionError, label_iou, predicted_label
from .splitter import child_labels, split_pair
from .sqtree import Side, SqPairNode, SqTree, child_node
from .superquadric import (
    EXPONENT_BOUNDS,
    SIZE_BOUNDS,
    OccupancyConfig,
    Superquadric,
    _stable_value_and_gradient,
)

MOMENTUM = 0.9
LOG_CLAMP = 1e-12

_JITTER_TRANSLATION = 0.05
_JITTER_ROTATION = 0.3
_INIT_SIZE_FACTOR = 2.0
_INIT_OFFSET_FACTOR = 0.25


class ConfigError(ValueError):
    """A fit configuration value or config-file entry is invalid."""


@dataclass(frozen=True)
class FitConfig:
    """Everything a fit depends on besides the data itself."""

    max_depth: int = 2
    iterations: int = 2000
    step_size: float = 0.01
    restarts: int = 4
    sharpness: float = 10.0
    seed: int = 0
    a_min: float = SIZE_BOUNDS[0]
    a_max: float = SIZE_BOUNDS[1]
    e_min: float = EXPONENT_BOUNDS[0]
    e_max: float = EXPONENT_BOUNDS[1]

    def validate(self) -> None:
        if self.max_depth < 1:
            raise ConfigError(f"max_depth must be >= 1, got {self.max_depth}")
        if self.iterations < 1:
            raise ConfigError(f"iterations must be >= 1, got {self.iterations}")
        if self.restarts < 1:
            raise ConfigError(f"restarts must be >= 1, got {self.restarts}")
        if not (np.isfinite(self.step_size) and self.step_size > 0):
            raise ConfigError(f"step_size must be positive, got {self.step_size}")
        if not (np.isfinite(self.sharpness) and self.sharpness > 0):
            raise ConfigError(f"sharpness must be positive, got {self.sharpness}")
        if self.seed < 0:
            raise ConfigError(f"seed must be non-negative, got {self.seed}")
        if not (0 < self.a_min <= self.a_max):
            raise ConfigError(f"size bounds must satisfy 0 < a_min <= a_max, got "
                              f"{self.a_min}, {self.a_max}")
        if not (0 < self.e_min <= self.e_max):
            raise ConfigError(f"exponent bounds must satisfy 0 < e_min <= e_max, got "
                              f"{self.e_min}, {self.e_max}")

    def occupancy(self) -> OccupancyConfig:
        return OccupancyConfig(sharpness=self.sharpness)

    @classmethod
    def from_file(cls, path) -> "FitConfig":
        """Parse a plain key-value config file (`key = value`, # comments).

        Keys are exactly the FitConfig field names; unknown keys and
        unparsable values raise ConfigError.
        """
        by_name = {f.name: f for f in fields(cls)}
        overrides: dict[str, object] = {}
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
                key, _, value = line.partition("=")
                key = key.strip()
                value = value.strip()
                if key not in by_name:
                    raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
                caster = by_name[key].type
                cast = int if caster in ("int", int) else float
                try:
                    overrides[key] = cast(value)
                except ValueError as exc:
                    raise ConfigError(f"{path}:{lineno}: bad value for {key}: {value!r}") from exc
        cfg = cls(**overrides)
        cfg.validate()
        return cfg


@dataclass(eq=False)
class NodeFit:
    """Result of fitting one node's pair."""

    sq_a: Superquadric
    sq_b: Superquadric
    loss: float
    degenerate: bool = False
    iterations: int = 0


@dataclass(eq=False)
class FitReport:
    """Bookkeeping for one full tree fit."""

    config: FitConfig
    node_losses: dict[tuple[int, int], float] = field(default_factory=dict)
    iterations_used: dict[tuple[int, int], int] = field(default_factory=dict)
    level_iou: list = field(default_factory=list)
    degenerate_nodes: list = field(default_factory=list)
    loss_sum: float = 0.0
    wall_time: float = 0.0


def node_loss(
    sq_a: Superquadric,
    sq_b: Superquadric,
    points,
    labels,
    cfg: OccupancyConfig = OccupancyConfig(),
) -> float:
    """Mean clamped BCE between max-of-pair occupancy and the labels."""
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    y = np.atleast_1d(np.asarray(labels))
    if len(pts) == 0:
        raise ValueError("node loss needs at least one point")
    if y.shape != (len(pts),):
        raise ValueError(f"labels shape {y.shape} does not match {len(pts)} points")
    loss, _, _ = _pair_loss_and_grad(sq_a, sq_b, pts, y.astype(np.float64), cfg.sharpness)
    return float(loss)


def _pair_loss_and_grad(sq_a, sq_b, points, y, sharpness):
    """Loss plus its (11,) gradients for both SQs.

    The max over the pair differentiates through the achieving branch (ties
    to a). Points where the BCE log clamp is active contribute zero gradient,
    which keeps the analytic gradient equal to the derivative of the clamped
    loss actually being reported.
    """
    ha, grad_a_h = _stable_value_and_gradient(sq_a, points)
    hb, grad_b_h = _stable_value_and_gradient(sq_b, points)
    ga = expit(sharpness * (1.0 - ha))
    gb = expit(sharpness * (1.0 - hb))
    a_wins = ga >= gb
    g = np.where(a_wins, ga, gb)

    positive = y == 1.0
    losses = np.where(
        positive,
        -np.log(np.maximum(g, LOG_CLAMP)),
        -np.log(np.maximum(1.0 - g, LOG_CLAMP)),
    )
    loss = losses.mean()

    clamped = np.where(positive, g < LOG_CLAMP, 1.0 - g < LOG_CLAMP)
    dz = np.where(clamped, 0.0, g - y) / len(y)
    # dz/dparams = -sharpness * dh/dparams on the winning branch only.
    grad_a = -sharpness * (np.where(a_wins, dz, 0.0) @ grad_a_h)
    grad_b = -sharpness * (np.where(a_wins, 0.0, dz) @ grad_b_h)
    return loss, grad_a, grad_b


def _principal_frame(inside: np.ndarray):
    """Centroid, principal directions (columns, right-handed), stds, extent."""
    mu = inside.mean(axis=0)
    centered = inside - mu
    cov = centered.T @ centered / len(inside)
    evals, evecs = np.linalg.eigh(cov)
    order = np.argsort(evals)[::-1]
    evals = np.clip(evals[order], 0.0, None)
    dirs = evecs[:, order]
    if np.linalg.det(dirs) < 0:
        dirs[:, 2] = -dirs[:, 2]
    stds = np.sqrt(evals)
    proj = centered @ dirs[:, 0]
    extent = float(proj.max() - proj.min()) if len(inside) > 1 else 0.0
    return mu, dirs, stds, extent


def init_node(
    points: np.ndarray,
    labels: np.ndarray,
    cfg: FitConfig,
    restart: int = 0,
    rng: np.random.Generator | None = None,
) -> tuple[Superquadric, Superquadric]:
    """Moment-based initial pair for one restart.

    Restart 0 is the canonical init: two ellipsoids at the inside-point
    centroid offset by +-0.25 of the first principal extent, sized from the
    per-axis standard deviations, oriented along the principal frame. A
    symmetric point set therefore yields a pair symmetric about its centroid.

    Later restarts explore the two failure modes of restart 0:

    * restarts 1-3 start the pair *coincident* at the centroid while cycling
      which principal axis plays the local z role. A coincident pair never
      separates (ties always feed side a), so these restarts amount to a
      single-SQ fit with three axis-role hypotheses, which wins on shapes one
      SQ can represent.
    * restarts >= 4 are offset pairs again, with axis-role cycling plus
      seeded translation/rotation jitter from ``rng``.

    The loss comparison across restarts then selects the right regime for the
    shape at hand.
    """
    inside = points[np.asarray(labels) == 1]
    if len(inside) == 0:
        raise ValueError("init_node needs at least one inside-labeled point")
    mu, dirs, stds, extent = _principal_frame(inside)

    coincident = 1 <= restart <= 3
    role = (restart - 1) % 3 if coincident else restart % 3
    # Columns of the rotation matrix are the world directions of the local
    # x, y, z axes; cyclic permutation keeps the frame right-handed.
    perm = np.roll(np.arange(3), -role)  # role 0: (0,1,2), 1: (1,2,0), 2: (2,0,1)
    rot = dirs[:, perm]
    sizes = np.clip(_INIT_SIZE_FACTOR * stds[perm], cfg.a_min, cfg.a_max)
    q = quat.from_matrix(rot)

    offset = np.zeros(3) if coincident else _INIT_OFFSET_FACTOR * extent * dirs[:, 0]
    exps = np.ones(2)
    pair = []
    for sign in (+1.0, -1.0):
        t = mu + sign * offset
        qq = q
        if restart >= 4:
            if rng is None:
                raise ValueError("jittered restarts need an rng")
            t = t + rng.normal(0.0, _JITTER_TRANSLATION, 3)
            qq = quat.normalize(
                quat.multiply(quat.from_rotation_vector(rng.normal(0.0, _JITTER_ROTATION, 3)), q)
            )
        pair.append(Superquadric(sizes, exps, t, qq))
    return pair[0], pair[1]


def _optimize_pair(sq_a, sq_b, points, y, cfg: FitConfig):
    """Momentum descent from one start; returns the best iterate seen."""
    pa = np.concatenate([sq_a.size, sq_a.exponents, sq_a.translation])
    pb = np.concatenate([sq_b.size, sq_b.exponents, sq_b.translation])
    qa, qb = sq_a.rotation, sq_b.rotation
    vel = np.zeros(22)

    def build(p, q):
        return Superquadric(p[:3], p[3:5], p[5:8], q)

    cur_a, cur_b = sq_a, sq_b
    best_loss = np.inf
    best = (sq_a, sq_b)
    for t in range(cfg.iterations):
        loss, ga, gb = _pair_loss_and_grad(cur_a, cur_b, points, y, cfg.sharpness)
        if loss < best_loss:
            best_loss, best = loss, (cur_a, cur_b)
        lr = cfg.step_size * 0.5 * (1.0 + np.cos(np.pi * t / cfg.iterations))
        vel = MOMENTUM * vel - lr * np.concatenate([ga, gb])
        pa = pa + vel[0:8]
        pb = pb + vel[11:19]
        for p in (pa, pb):
            p[0:3] = np.clip(p[0:3], cfg.a_min, cfg.a_max)
            p[3:5] = np.clip(p[3:5], cfg.e_min, cfg.e_max)
        qa = quat.normalize(quat.multiply(quat.from_rotation_vector(vel[8:11]), qa))
        qb = quat.normalize(quat.multiply(quat.from_rotation_vector(vel[19:22]), qb))
        cur_a, cur_b = build(pa, qa), build(pb, qb)
    loss, _, _ = _pair_loss_and_grad(cur_a, cur_b, points, y, cfg.sharpness)
    if loss < best_loss:
        best_loss, best = loss, (cur_a, cur_b)
    return best[0], best[1], float(best_loss)


def fit_node(
    points,
    labels,
    cfg: FitConfig,
    node: tuple[int, int] = (1, 1),
) -> NodeFit:
    """Fit one node's pair with restarts; deterministic for a fixed config.

    Restart r of node (d, i) draws its jitter from
    SeedSequence(cfg.seed, spawn_key=(d, i, r)), so results do not depend on
    scheduling order. A node with no inside-labeled points returns the
    degenerate sentinel without optimizing.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    y = np.asarray(labels)
    if len(pts) == 0:
        raise ValueError("fit_node needs at least one point")
    if y.shape != (len(pts),):
        raise ValueError(f"labels shape {y.shape} does not match {len(pts)} points")
    occ = cfg.occupancy()

    if int(y.sum()) == 0:
        centroid = pts.mean(axis=0)
        sentinel = Superquadric(np.full(3, cfg.a_min), np.ones(2), centroid)
        return NodeFit(
            sq_a=sentinel,
            sq_b=sentinel,
            loss=node_loss(sentinel, sentinel, pts, y, occ),
            degenerate=True,
            iterations=0,
        )

    yf = y.astype(np.float64)
    best: tuple[Superquadric, Superquadric, float] | None = None
    for r in range(cfg.restarts):
        rng = np.random.default_rng(
            np.random.SeedSequence(cfg.seed, spawn_key=(node[0], node[1], r))
        )
        start_a, start_b = init_node(pts, y, cfg, restart=r, rng=rng)
        result = _optimize_pair(start_a, start_b, pts, yf, cfg)
        if best is None or result[2] < best[2]:
            best = result
    return NodeFit(
        sq_a=best[0],
        sq_b=best[1],
        loss=best[2],
        degenerate=False,
        iterations=cfg.iterations * cfg.restarts,
    )


def fit_tree(
    pointset: LabeledPointSet,
    cfg: FitConfig,
    threads: int = 1,
) -> tuple[SqTree, FitReport]:
    """Fit the whole pair tree, breadth-first, down to cfg.max_depth.

    Level d+1's training labels come from splitting each level-d node's
    points between its two SQs. ``threads`` caps the worker count for
    fitting the nodes of one level in parallel (0 means one per CPU);
    results are identical for any thread count.
    """
    cfg.validate()
    t0 = time.perf_counter()
    occ = cfg.occupancy()
    points = pointset.points
    report = FitReport(config=cfg)
    tree = SqTree(max_depth=cfg.max_depth, points=points)

    workers = threads if threads > 0 else (os.cpu_count() or 1)

    def record(key, labels, fit: NodeFit) -> None:
        tree.add_node(
            SqPairNode(key[0], key[1], fit.sq_a, fit.sq_b, labels=labels,
                       degenerate=fit.degenerate)
        )
        report.node_losses[key] = fit.loss
        report.iterations_used[key] = fit.iterations
        if fit.degenerate:
            report.degenerate_nodes.append(key)

    record((1, 1), pointset.labels, fit_node(points, pointset.labels, cfg, node=(1, 1)))

    for depth in range(1, cfg.max_depth):
        tasks = []
        for parent in tree.level_nodes(depth):
            assignment = split_pair(parent.sq_a, parent.sq_b, points)
            for side in (Side.A, Side.B):
                key = child_node(depth, parent.index, side)
                tasks.append((key, child_labels(parent.labels, assignment, side.value)))
        if workers > 1 and len(tasks) > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                fits = list(
                    pool.map(lambda t: fit_node(points, t[1], cfg, node=t[0]), tasks)
                )
        else:
            fits = [fit_node(points, labels, cfg, node=key) for key, labels in tasks]
        for (key, labels), fit in zip(tasks, fits):
            record(key, labels, fit)

    truth = pointset.labels
    for depth in range(1, cfg.max_depth + 1):
        sqs = tree.superquadrics_at_level(depth)
        try:
            iou = label_iou(predicted_label(sqs, points, occ), truth)
        except EmptyUnionError:
            iou = None
        report.level_iou.append(iou)

    report.loss_sum = float(sum(report.node_losses.values()) * len(points))
    report.wall_time = time.perf_counter() - t0
    return tree, report


def config_as_dict(cfg: FitConfig) -> dict:
    """Plain-dict echo of a config (JSON-ready, field order fixed)."""
    return {f.name: getattr(cfg, f.name) for f in dataclasses.fields(cfg)}
