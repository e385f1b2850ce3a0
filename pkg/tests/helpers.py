"""Shared corpus generators and finite-difference harnesses for the tests."""

import numpy as np

from sqdecomp import OccupancyConfig, Superquadric, occupancy
from sqdecomp import quaternions as quat


def random_superquadric(rng: np.random.Generator, margin: float = 0.05) -> Superquadric:
    """Draw one superquadric safely interior to the parameter bounds.

    ``margin`` keeps sizes and exponents away from the clip boundaries so
    finite-difference probes (step 1e-5) never leave the valid region.
    """
    size = rng.uniform(0.005 + margin, 1.0 - margin, 3)
    exponents = rng.uniform(0.1 + margin, 1.9 - margin, 2)
    translation = rng.uniform(-0.3, 0.3, 3)
    rotation = quat.normalize(rng.normal(size=4))
    return Superquadric(size, exponents, translation, rotation)


def random_pair(rng: np.random.Generator):
    return random_superquadric(rng), random_superquadric(rng)


def perturbed(sq: Superquadric, index: int, delta: float) -> Superquadric:
    """Shift one of the 11 degrees of freedom by delta.

    Indices 0..7 are (a1, a2, a3, e1, e2, t1, t2, t3); 8..10 are the
    components of a world-frame rotation tangent applied by retraction.
    """
    p = sq.params()
    if index < 8:
        p = p.copy()
        p[index] += delta
        return Superquadric(p[:3], p[3:5], p[5:8], p[8:12])
    u = np.zeros(3)
    u[index - 8] = delta
    q = quat.normalize(quat.multiply(quat.from_rotation_vector(u), sq.rotation))
    return Superquadric(sq.size, sq.exponents, sq.translation, q)


def occupancy_fd(sq: Superquadric, x, cfg: OccupancyConfig, step: float = 1e-5) -> np.ndarray:
    """Central-difference occupancy gradient over the 11 DOF, shape (n, 11)."""
    pts = np.atleast_2d(np.asarray(x, dtype=np.float64))
    out = np.empty((len(pts), 11))
    for k in range(11):
        hi = occupancy(perturbed(sq, k, +step), pts, cfg)
        lo = occupancy(perturbed(sq, k, -step), pts, cfg)
        out[:, k] = (hi - lo) / (2.0 * step)
    return out


def gradient_corpus(rng: np.random.Generator, n: int):
    """Yield n well-conditioned (sq, point) pairs for gradient checks.

    Points are kept at F in [0.2, 5] and at least 1e-3 away from the local
    coordinate planes, where fractional powers stay smooth.
    """
    from sqdecomp import inside_outside, world_to_local

    made = 0
    while made < n:
        sq = random_superquadric(rng)
        pts = sq.translation + rng.uniform(-0.8, 0.8, (64, 3))
        f = inside_outside(sq, pts)
        local = world_to_local(sq, pts)
        ok = (f >= 0.2) & (f <= 5.0) & (np.abs(local) >= 1e-3).all(axis=1)
        for p in pts[ok]:
            yield sq, p
            made += 1
            if made == n:
                return
