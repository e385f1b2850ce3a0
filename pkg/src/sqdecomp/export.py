"""Persistence and visualization output: tree JSON, surface OBJ, field CSVs."""

from __future__ import annotations

import json
import os

import numpy as np

from .fitter import FitReport, config_as_dict
from .splitter import SliceSpec, SplitField, split_field_2d
from .sqtree import SqPairNode, SqTree
from .superquadric import Superquadric, surface_points

FORMAT_VERSION = 1


class TreeFormatError(ValueError):
    """The tree JSON file is malformed or has an unsupported version."""


def _sq_params_list(sq: Superquadric) -> list:
    return [float(v) for v in sq.params()]


def save_tree(tree: SqTree, report: FitReport | None, path) -> None:
    """Write the fitted tree as JSON.

    All parameters are serialized through Python float repr (17 significant
    digits), so a load/save round-trip is bit-exact. The metadata block
    carries the config echo and per-level IoU from the report; wall-clock
    time deliberately stays out so that identical runs produce identical
    bytes.
    """
    if not tree.has_level(1):
        raise ValueError("tree has no fitted root; nothing to save")
    nodes = []
    for key in sorted(tree.nodes):
        node = tree.nodes[key]
        nodes.append(
            {
                "depth": node.depth,
                "index": node.index,
                "lambda_a": _sq_params_list(node.sq_a),
                "lambda_b": _sq_params_list(node.sq_b),
                "degenerate": bool(node.degenerate),
            }
        )
    metadata: dict = {}
    if report is not None:
        metadata["config"] = config_as_dict(report.config)
        metadata["level_iou"] = [
            None if v is None else float(v) for v in report.level_iou
        ]
        metadata["node_losses"] = [
            [d, i, float(loss)] for (d, i), loss in sorted(report.node_losses.items())
        ]
        metadata["loss_sum"] = float(report.loss_sum)
    doc = {
        "format_version": FORMAT_VERSION,
        "max_depth": tree.max_depth,
        "nodes": nodes,
        "metadata": metadata,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_tree(path) -> tuple[SqTree, dict]:
    """Read a tree JSON written by :func:`save_tree`.

    Returns the tree (without sample points or labels) and the metadata
    dict. Raises TreeFormatError for unparsable JSON, missing fields, or a
    format version this code does not understand.
    """
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise TreeFormatError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise TreeFormatError(f"{path}: expected a JSON object at top level")
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise TreeFormatError(
            f"{path}: unsupported format version {version!r} (expected {FORMAT_VERSION})"
        )
    try:
        tree = SqTree(max_depth=int(doc["max_depth"]))
        for entry in sorted(doc["nodes"], key=lambda e: (e["depth"], e["index"])):
            tree.add_node(
                SqPairNode(
                    depth=int(entry["depth"]),
                    index=int(entry["index"]),
                    sq_a=Superquadric.from_params(np.array(entry["lambda_a"])),
                    sq_b=Superquadric.from_params(np.array(entry["lambda_b"])),
                    degenerate=bool(entry.get("degenerate", False)),
                )
            )
    except (KeyError, TypeError, ValueError) as exc:
        raise TreeFormatError(f"{path}: malformed tree document: {exc}") from exc
    return tree, doc.get("metadata", {})


def _triangulate_grid(grid: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Deduplicated vertices and closed triangulation of a surface grid.

    The grid rows run pole to pole (the two pole rows are constant); rings in
    between are closed in the omega direction. Output is (vertices (v, 3),
    faces (f, 3)) with the south pole first, ring vertices row-major, north
    pole last, wound outward.
    """
    n_eta, n_omega, _ = grid.shape
    rings = grid[1:-1]  # (n_eta - 2, n_omega, 3)
    n_rings = n_eta - 2
    vertices = np.vstack([grid[0, 0][None, :], rings.reshape(-1, 3), grid[-1, 0][None, :]])
    south = 0
    north = 1 + n_rings * n_omega

    def ring(r: int, c: int) -> int:
        return 1 + r * n_omega + (c % n_omega)

    faces = []
    for c in range(n_omega):
        faces.append((south, ring(0, c + 1), ring(0, c)))
    for r in range(n_rings - 1):
        for c in range(n_omega):
            a, b = ring(r, c), ring(r, c + 1)
            cc, d = ring(r + 1, c + 1), ring(r + 1, c)
            faces.append((a, b, cc))
            faces.append((a, cc, d))
    for c in range(n_omega):
        faces.append((north, ring(n_rings - 1, c), ring(n_rings - 1, c + 1)))
    return vertices, np.array(faces, dtype=np.intp)


def export_level_obj(tree: SqTree, depth: int, path, resolution: int = 32) -> None:
    """Write the 2^depth surface meshes of one level as a grouped OBJ.

    Each superquadric becomes one `g sq_{d}_{i}_{a|b}` group with a closed
    quad-strip lattice (fan caps at the poles). ``resolution`` is the number
    of parametric samples per direction (>= 3).
    """
    sqs = []
    for node in tree.level_nodes(depth):
        sqs.append((f"sq_{node.depth}_{node.index}_a", node.sq_a))
        sqs.append((f"sq_{node.depth}_{node.index}_b", node.sq_b))
    with open(path, "w", encoding="utf-8") as fh:
        base = 0
        for name, sq in sqs:
            grid = surface_points(sq, resolution, resolution)
            vertices, faces = _triangulate_grid(grid)
            fh.write(f"g {name}\n")
            for v in vertices:
                fh.write(f"v {float(v[0])!r} {float(v[1])!r} {float(v[2])!r}\n")
            for f in faces:
                fh.write(f"f {base + f[0] + 1} {base + f[1] + 1} {base + f[2] + 1}\n")
            base += len(vertices)


def _format_cell(value: float) -> str:
    return repr(float(value))


def export_split_csv(sq_a: Superquadric, sq_b: Superquadric, spec: SliceSpec, path) -> None:
    """Write one slice's combined fields as CSV.

    Columns: x,y (slice coordinates), Fa,Fb (the F^e1 values the split rule
    compares), da,db (radial distances), selector (A or B). Row order is
    row-major over the (nv, nu) grid. Deterministic: identical inputs yield
    identical bytes.
    """
    fld = split_field_2d(sq_a, sq_b, spec)
    _write_fields_csv(fld, path, "x,y,Fa,Fb,da,db,selector", _combined_row)


def _combined_row(fld: SplitField, iv: int, iu: int) -> str:
    sel = "A" if fld.to_a[iv, iu] else "B"
    return ",".join(
        [
            _format_cell(fld.u[iu]),
            _format_cell(fld.v[iv]),
            _format_cell(fld.h_a[iv, iu]),
            _format_cell(fld.h_b[iv, iu]),
            _format_cell(fld.d_a[iv, iu]),
            _format_cell(fld.d_b[iv, iu]),
            sel,
        ]
    )


def _write_fields_csv(fld: SplitField, path, header: str, row_fn) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(header + "\n")
        for iv in range(len(fld.v)):
            for iu in range(len(fld.u)):
                fh.write(row_fn(fld, iv, iu) + "\n")


def export_split_demo_csvs(
    sq_a: Superquadric, sq_b: Superquadric, spec: SliceSpec, out_dir
) -> list:
    """Write the three split-demo CSVs (F^e1 fields, d fields, selector).

    Returns the written paths: split_f.csv, split_d.csv, split_selector.csv
    inside ``out_dir``. Same grid layout as :func:`export_split_csv`.
    """
    fld = split_field_2d(sq_a, sq_b, spec)

    def f_row(fld, iv, iu):
        return ",".join(
            [
                _format_cell(fld.u[iu]),
                _format_cell(fld.v[iv]),
                _format_cell(fld.h_a[iv, iu]),
                _format_cell(fld.h_b[iv, iu]),
            ]
        )

    def d_row(fld, iv, iu):
        return ",".join(
            [
                _format_cell(fld.u[iu]),
                _format_cell(fld.v[iv]),
                _format_cell(fld.d_a[iv, iu]),
                _format_cell(fld.d_b[iv, iu]),
            ]
        )

    def sel_row(fld, iv, iu):
        sel = "A" if fld.to_a[iv, iu] else "B"
        return ",".join([_format_cell(fld.u[iu]), _format_cell(fld.v[iv]), sel])

    paths = [
        os.path.join(out_dir, "split_f.csv"),
        os.path.join(out_dir, "split_d.csv"),
        os.path.join(out_dir, "split_selector.csv"),
    ]
    _write_fields_csv(fld, paths[0], "x,y,Fa,Fb", f_row)
    _write_fields_csv(fld, paths[1], "x,y,da,db", d_row)
    _write_fields_csv(fld, paths[2], "x,y,selector", sel_row)
    return paths
