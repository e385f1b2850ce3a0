"""Triangle meshes, OBJ I/O, normalization, inside tests, and point sampling.

The data pipeline turns a watertight triangle mesh into a labeled point set:
normalize the mesh so its bounding box is centered at the origin with longest
side 1, draw points from the axis-aligned domain [-0.6, 0.6]^3 (uniform) and
from the surface (with Gaussian offsets), and label each point by a ray-parity
inside test. Points on the surface count as inside.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SAMPLING_DOMAIN = (-0.6, 0.6)
SURFACE_NOISE_SIGMA = 0.05

# Base ray direction for parity tests: an arbitrary fixed irrational-ish
# direction so axis-aligned geometry almost never produces degenerate hits.
_BASE_DIRECTION = np.array([0.57721566490153287, 0.30102999566398120, 0.78539816339744831])
_MAX_RAY_RETRIES = 32

_PARALLEL_EPS = 1e-12
_BARY_EPS = 1e-10
_ON_SURFACE_T = 1e-12


class MeshFormatError(ValueError):
    """The OBJ file is malformed (bad record, bad index, too few vertices)."""


class DegenerateMeshError(ValueError):
    """The mesh cannot be normalized (zero extent) or is otherwise unusable."""


class RayDegeneracyError(RuntimeError):
    """All retry directions produced degenerate ray-triangle intersections."""


@dataclass(frozen=True, eq=False)
class Mesh:
    """Indexed triangle mesh. Vertices (v, 3) float64, triangles (t, 3) int."""

    vertices: np.ndarray
    triangles: np.ndarray

    def __post_init__(self) -> None:
        vertices = np.array(self.vertices, dtype=np.float64)
        triangles = np.array(self.triangles, dtype=np.intp)
        if vertices.ndim != 2 or vertices.shape[1] != 3:
            raise ValueError(f"vertices must have shape (v, 3), got {vertices.shape}")
        if triangles.ndim != 2 or triangles.shape[1] != 3:
            raise ValueError(f"triangles must have shape (t, 3), got {triangles.shape}")
        if len(triangles) and (triangles.min() < 0 or triangles.max() >= len(vertices)):
            raise ValueError("triangle indices out of range")
        if not np.all(np.isfinite(vertices)):
            raise ValueError("vertices must be finite")
        vertices.setflags(write=False)
        triangles.setflags(write=False)
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "triangles", triangles)

    @property
    def triangle_corners(self) -> np.ndarray:
        """Corner coordinates per triangle, shape (t, 3, 3)."""
        return self.vertices[self.triangles]


@dataclass(frozen=True, eq=False)
class LabeledPointSet:
    """Sample points (n, 3) with uint8 inside labels (n,)."""

    points: np.ndarray
    labels: np.ndarray

    def __post_init__(self) -> None:
        points = np.array(self.points, dtype=np.float64)
        labels = np.array(self.labels, dtype=np.uint8)
        if points.ndim != 2 or points.shape[1] != 3:
            raise ValueError(f"points must have shape (n, 3), got {points.shape}")
        if labels.shape != (len(points),):
            raise ValueError("labels must be one uint8 per point")
        if len(points) == 0:
            raise ValueError("point set must not be empty")
        if not np.all((labels == 0) | (labels == 1)):
            raise ValueError("labels must be 0 or 1")
        points.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return len(self.points)


def load_mesh(path) -> Mesh:
    """Read a Wavefront OBJ file (v and f records only).

    Faces with more than three vertices are fan-triangulated around their
    first vertex. Texture/normal references (v/vt/vn forms) are accepted and
    ignored. Raises MeshFormatError for malformed records or out-of-range
    indices, OSError if the file cannot be read.
    """
    vertices: list[list[float]] = []
    faces: list[list[int]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            tag = parts[0]
            if tag == "v":
                if len(parts) < 4:
                    raise MeshFormatError(f"{path}:{lineno}: vertex needs 3 coordinates")
                try:
                    vertices.append([float(parts[1]), float(parts[2]), float(parts[3])])
                except ValueError as exc:
                    raise MeshFormatError(f"{path}:{lineno}: bad vertex coordinate") from exc
            elif tag == "f":
                refs = parts[1:]
                if len(refs) < 3:
                    raise MeshFormatError(f"{path}:{lineno}: face needs at least 3 vertices")
                idx = []
                for ref in refs:
                    token = ref.split("/")[0]
                    try:
                        k = int(token)
                    except ValueError as exc:
                        raise MeshFormatError(f"{path}:{lineno}: bad face index {ref!r}") from exc
                    if k < 1:
                        raise MeshFormatError(
                            f"{path}:{lineno}: face indices must be positive, got {k}"
                        )
                    idx.append(k - 1)
                for i in range(1, len(idx) - 1):
                    faces.append([idx[0], idx[i], idx[i + 1]])
            # all other record types (vn, vt, g, o, s, usemtl, ...) are ignored
    if not vertices:
        raise MeshFormatError(f"{path}: no vertices")
    verts = np.array(vertices, dtype=np.float64)
    tris = np.array(faces, dtype=np.intp) if faces else np.zeros((0, 3), dtype=np.intp)
    if len(tris) and tris.max() >= len(verts):
        raise MeshFormatError(f"{path}: face index {tris.max() + 1} exceeds vertex count")
    return Mesh(verts, tris)


def save_mesh(mesh: Mesh, path) -> None:
    """Write a mesh as a minimal OBJ file (v and f records)."""
    with open(path, "w", encoding="utf-8") as fh:
        for v in mesh.vertices:
            fh.write(f"v {float(v[0])!r} {float(v[1])!r} {float(v[2])!r}\n")
        for t in mesh.triangles:
            fh.write(f"f {t[0] + 1} {t[1] + 1} {t[2] + 1}\n")


def normalize(mesh: Mesh) -> Mesh:
    """Center the bounding box at the origin and scale its longest side to 1.

    After normalization every vertex lies in [-0.5, 0.5]^3. Raises
    DegenerateMeshError if the mesh has zero extent in all axes.
    """
    if len(mesh.vertices) == 0:
        raise DegenerateMeshError("cannot normalize an empty mesh")
    lo = mesh.vertices.min(axis=0)
    hi = mesh.vertices.max(axis=0)
    extent = float(np.max(hi - lo))
    if extent <= 0.0:
        raise DegenerateMeshError("mesh has zero extent; all vertices coincide")
    center = 0.5 * (lo + hi)
    return Mesh((mesh.vertices - center) / extent, mesh.triangles)


def _retry_directions() -> np.ndarray:
    """Fixed, deterministic sequence of unit ray directions."""
    rng = np.random.default_rng(20090103)
    extra = rng.normal(size=(_MAX_RAY_RETRIES - 1, 3))
    dirs = np.vstack([_BASE_DIRECTION, extra])
    return dirs / np.linalg.norm(dirs, axis=1, keepdims=True)


_DIRECTIONS = _retry_directions()


def _classify_chunk(points: np.ndarray, corners: np.ndarray, direction: np.ndarray):
    """Ray-parity test for one chunk of points against all triangles.

    Returns (resolved mask, inside labels). A point is unresolved when its ray
    produced a degenerate intersection (hit near a triangle edge/vertex, or
    ran parallel within a triangle's plane) and needs a different direction.
    Points lying on the surface resolve immediately as inside.
    """
    a = corners[:, 0]
    e1 = corners[:, 1] - a
    e2 = corners[:, 2] - a
    pvec = np.cross(direction, e2)
    det = np.einsum("tk,tk->t", e1, pvec)
    parallel = np.abs(det) < _PARALLEL_EPS
    safe_det = np.where(parallel, 1.0, det)

    normal = np.cross(e1, e2)
    norm_len = np.linalg.norm(normal, axis=1)
    norm_len = np.where(norm_len == 0, 1.0, norm_len)

    s = points[:, None, :] - a[None, :, :]          # (n, t, 3)
    u = np.einsum("ntk,tk->nt", s, pvec) / safe_det
    qvec = np.cross(s, e1[None, :, :])
    v = np.einsum("ntk,k->nt", qvec, direction) / safe_det
    t_hit = np.einsum("ntk,tk->nt", qvec, e2) / safe_det

    plane_dist = np.abs(np.einsum("ntk,tk->nt", s, normal)) / norm_len

    bary_wide = (u > -_BARY_EPS) & (v > -_BARY_EPS) & (u + v < 1.0 + _BARY_EPS)
    bary_strict = (u > _BARY_EPS) & (v > _BARY_EPS) & (u + v < 1.0 - _BARY_EPS)

    on_surface = (~parallel[None, :]) & (np.abs(t_hit) <= _ON_SURFACE_T) & bary_wide
    forward = (~parallel[None, :]) & (t_hit > _ON_SURFACE_T)
    counted = forward & bary_strict
    grazing = forward & bary_wide & ~bary_strict
    coplanar = parallel[None, :] & (plane_dist < 1e-9)

    is_on_surface = on_surface.any(axis=1)
    is_degenerate = (grazing | coplanar).any(axis=1) & ~is_on_surface
    parity = counted.sum(axis=1) & 1

    resolved = is_on_surface | ~is_degenerate
    labels = np.where(is_on_surface, 1, parity).astype(np.uint8)
    return resolved, labels


def point_in_mesh(mesh: Mesh, points) -> np.ndarray:
    """1 for points inside or on the mesh surface, 0 outside.

    Casts a ray per point and counts proper triangle crossings (odd = inside).
    Rays that graze an edge or vertex are retried along the next direction in
    a fixed deterministic sequence, so results never depend on luck. Raises
    RayDegeneracyError if a point stays unresolved after all retries (does not
    happen for watertight meshes) and DegenerateMeshError for meshes with no
    triangles.
    """
    if len(mesh.triangles) == 0:
        raise DegenerateMeshError("mesh has no triangles; inside test undefined")
    pts = np.asarray(points, dtype=np.float64)
    single = pts.ndim == 1
    pts = np.atleast_2d(pts)
    if pts.shape[1] != 3:
        raise ValueError(f"points must have shape (n, 3), got {pts.shape}")

    corners = mesh.triangle_corners
    labels = np.zeros(len(pts), dtype=np.uint8)
    unresolved = np.ones(len(pts), dtype=bool)
    # Keep the (n, t, 3) intermediates around ~200 MB peak.
    chunk = max(1, int(2_000_000 / max(len(corners), 1)))

    for direction in _DIRECTIONS:
        idx = np.flatnonzero(unresolved)
        if len(idx) == 0:
            break
        for start in range(0, len(idx), chunk):
            sel = idx[start:start + chunk]
            resolved, lab = _classify_chunk(pts[sel], corners, direction)
            done = sel[resolved]
            labels[done] = lab[resolved]
            unresolved[done] = False
    if unresolved.any():
        raise RayDegeneracyError(
            f"{int(unresolved.sum())} points could not be classified after "
            f"{_MAX_RAY_RETRIES} ray directions"
        )
    return labels[0] if single else labels


def triangle_areas(mesh: Mesh) -> np.ndarray:
    """Area of each triangle, shape (t,)."""
    corners = mesh.triangle_corners
    cross = np.cross(corners[:, 1] - corners[:, 0], corners[:, 2] - corners[:, 0])
    return 0.5 * np.linalg.norm(cross, axis=1)


def sample_surface(mesh: Mesh, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw n points uniformly by area from the mesh surface."""
    areas = triangle_areas(mesh)
    total = areas.sum()
    if total <= 0:
        raise DegenerateMeshError("mesh surface area is zero")
    tri = rng.choice(len(areas), size=n, p=areas / total)
    corners = mesh.triangle_corners[tri]
    r1 = rng.random(n)
    r2 = rng.random(n)
    sqrt_r1 = np.sqrt(r1)
    w0 = 1.0 - sqrt_r1
    w1 = sqrt_r1 * (1.0 - r2)
    w2 = sqrt_r1 * r2
    return (
        w0[:, None] * corners[:, 0]
        + w1[:, None] * corners[:, 1]
        + w2[:, None] * corners[:, 2]
    )


def sample_labeled_points(
    mesh: Mesh, n_surface: int, n_uniform: int, seed: int
) -> LabeledPointSet:
    """Draw the training point set for a normalized mesh and label it.

    n_uniform points come from the uniform law on [-0.6, 0.6]^3; n_surface
    points are drawn by area from the surface and jittered by isotropic
    Gaussian noise (sigma 0.05). Labels are ray-parity inside tests, surface
    points count as inside. Deterministic for a fixed seed: same mesh, same
    counts, same seed give byte-identical output.
    """
    if n_uniform < 0 or n_surface < 0:
        raise ValueError("sample counts must be non-negative")
    if n_uniform + n_surface == 0:
        raise ValueError("need at least one sample point")
    rng = np.random.default_rng(seed)
    lo, hi = SAMPLING_DOMAIN
    parts = []
    if n_uniform:
        parts.append(rng.uniform(lo, hi, size=(n_uniform, 3)))
    if n_surface:
        base = sample_surface(mesh, n_surface, rng)
        parts.append(base + rng.normal(0.0, SURFACE_NOISE_SIGMA, size=(n_surface, 3)))
    points = np.vstack(parts)
    labels = point_in_mesh(mesh, points)
    return LabeledPointSet(points, labels)
