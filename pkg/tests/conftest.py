"""Session fixtures: meshes and the two reference fits shared across tests.

The dumbbell and sphere fits are expensive (seconds to tens of seconds), so
they run once per session and every test that needs a fitted tree reuses
them. Their configs are part of the acceptance setup and must not drift.
"""

import numpy as np
import pytest

from sqdecomp import (
    FitConfig,
    dumbbell,
    fit_tree,
    icosphere,
    normalize,
    sample_labeled_points,
    save_mesh,
)


@pytest.fixture(scope="session")
def sphere_mesh():
    return normalize(icosphere(radius=0.4, subdivisions=2))


@pytest.fixture(scope="session")
def dumbbell_mesh():
    return normalize(dumbbell(box_side=0.3, center_offset=0.3))


@pytest.fixture(scope="session")
def mesh_dir(tmp_path_factory, sphere_mesh, dumbbell_mesh):
    d = tmp_path_factory.mktemp("meshes")
    save_mesh(sphere_mesh, d / "sphere.obj")
    save_mesh(dumbbell_mesh, d / "dumbbell.obj")
    return d


@pytest.fixture(scope="session")
def sphere_fit(sphere_mesh):
    """Depth-1 fit of the sphere: (tree, report, training pointset)."""
    pointset = sample_labeled_points(sphere_mesh, n_surface=2000, n_uniform=6000, seed=0)
    cfg = FitConfig(
        max_depth=1, iterations=400, step_size=0.005, restarts=4, sharpness=50.0, seed=0
    )
    tree, report = fit_tree(pointset, cfg)
    return tree, report, pointset


@pytest.fixture(scope="session")
def dumbbell_fit(dumbbell_mesh):
    """Depth-2 fit of the two-box dumbbell: (tree, report, training pointset)."""
    pointset = sample_labeled_points(dumbbell_mesh, n_surface=2000, n_uniform=6000, seed=0)
    cfg = FitConfig(
        max_depth=2, iterations=1000, step_size=0.005, restarts=4, sharpness=50.0, seed=0
    )
    tree, report = fit_tree(pointset, cfg)
    return tree, report, pointset
