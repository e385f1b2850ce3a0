"""Binary tree of superquadric pairs.

Every node holds one fitted pair. Node (d, i) lives at depth d >= 1 with
index 1 <= i <= 2^(d-1), so level d holds 2^(d-1) nodes and 2^d
superquadrics. The root is (1, 1). Children of (d, i) are (d+1, 2i-1), grown
from side b, and (d+1, 2i), grown from side a; equivalently the parent SQ of
node (d, i) sits on side a when i is even and side b when i is odd.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .splitter import child_labels, split_pair
from .superquadric import Superquadric


class Side(str, Enum):
    A = "a"
    B = "b"


def _check_key(depth: int, index: int) -> None:
    if depth < 1:
        raise ValueError(f"depth must be >= 1, got {depth}")
    if not (1 <= index <= 2 ** (depth - 1)):
        raise ValueError(f"index {index} out of range at depth {depth}")


def parent_node(depth: int, index: int) -> tuple[int, int]:
    """Tree coordinates of the parent of node (depth, index)."""
    _check_key(depth, index)
    if depth == 1:
        raise ValueError("the root (1, 1) has no parent")
    return depth - 1, (index + 1) // 2


def parent_sq(depth: int, index: int) -> tuple[int, int, Side]:
    """The specific parent-pair SQ whose region node (depth, index) refines."""
    d, i = parent_node(depth, index)
    return d, i, Side.A if index % 2 == 0 else Side.B


def uncle_sq(depth: int, index: int) -> tuple[int, int, Side]:
    """The sibling SQ of the parent SQ (the other half of the parent pair)."""
    d, i, side = parent_sq(depth, index)
    return d, i, Side.B if side is Side.A else Side.A


def child_node(depth: int, index: int, side: Side) -> tuple[int, int]:
    """Child coordinates grown from one side of node (depth, index)."""
    _check_key(depth, index)
    return depth + 1, 2 * index if side is Side.A else 2 * index - 1


@dataclass(eq=False)
class SqPairNode:
    """One tree node: a fitted SQ pair plus this node's inside labels."""

    depth: int
    index: int
    sq_a: Superquadric
    sq_b: Superquadric
    labels: np.ndarray | None = None
    degenerate: bool = False

    def __post_init__(self) -> None:
        _check_key(self.depth, self.index)
        if self.labels is not None:
            labels = np.asarray(self.labels, dtype=np.uint8)
            if labels.ndim != 1:
                raise ValueError("labels must be a 1D array")
            self.labels = labels

    @property
    def key(self) -> tuple[int, int]:
        return self.depth, self.index

    def sq(self, side: Side) -> Superquadric:
        return self.sq_a if side is Side.A else self.sq_b


@dataclass(eq=False)
class SqTree:
    """All fitted nodes of one decomposition, keyed by (depth, index).

    ``points`` is the shared sample-point array all node labels refer to; it
    is None for trees restored from disk (parameters only).
    """

    max_depth: int
    points: np.ndarray | None = None
    nodes: dict[tuple[int, int], SqPairNode] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.max_depth < 1:
            raise ValueError(f"max_depth must be >= 1, got {self.max_depth}")
        if self.points is not None:
            points = np.asarray(self.points, dtype=np.float64)
            if points.ndim != 2 or points.shape[1] != 3:
                raise ValueError(f"points must have shape (n, 3), got {points.shape}")
            self.points = points

    def add_node(self, node: SqPairNode) -> None:
        if node.depth > self.max_depth:
            raise ValueError(f"node depth {node.depth} exceeds max_depth {self.max_depth}")
        if node.depth > 1 and parent_node(node.depth, node.index) not in self.nodes:
            raise ValueError(f"parent of {node.key} not in tree")
        if node.labels is not None and self.points is not None:
            if len(node.labels) != len(self.points):
                raise ValueError("node labels length does not match tree points")
        self.nodes[node.key] = node

    def node(self, depth: int, index: int) -> SqPairNode:
        key = (depth, index)
        if key not in self.nodes:
            raise KeyError(f"node {key} not in tree")
        return self.nodes[key]

    @property
    def fitted_depth(self) -> int:
        """Deepest level whose nodes are all present (0 for an empty tree)."""
        d = 0
        while d < self.max_depth and self.has_level(d + 1):
            d += 1
        return d

    def has_level(self, depth: int) -> bool:
        return all((depth, i) in self.nodes for i in range(1, 2 ** (depth - 1) + 1))

    def level_nodes(self, depth: int) -> list[SqPairNode]:
        """All nodes of one level, ordered by index. The level must be complete."""
        if not self.has_level(depth):
            raise ValueError(f"level {depth} is not fully fitted")
        return [self.nodes[(depth, i)] for i in range(1, 2 ** (depth - 1) + 1)]

    def superquadrics_at_level(self, depth: int) -> list[Superquadric]:
        """The 2^depth SQs of one level, ordered by (index, side a then b)."""
        out = []
        for node in self.level_nodes(depth):
            out.append(node.sq_a)
            out.append(node.sq_b)
        return out


def all_leaves_at(tree: SqTree, depth: int) -> list[Superquadric]:
    """The flat list of 2^depth superquadrics at one fitted level.

    Ordered by (index, side a then b). Raises ValueError if the level is
    not fully fitted.
    """
    return tree.superquadrics_at_level(depth)


def recompute_labels(tree: SqTree) -> dict[tuple[int, int], np.ndarray]:
    """Re-derive every node's labels from the root labels and the split rule.

    Walks the tree top-down: each child's labels are the parent's labels
    AND-ed with assignment to the side the child grew from. Used to audit
    stored label sets. Requires the tree to carry points and root labels.
    """
    if tree.points is None:
        raise ValueError("tree carries no points; cannot recompute labels")
    root = tree.node(1, 1)
    if root.labels is None:
        raise ValueError("root node carries no labels")
    out: dict[tuple[int, int], np.ndarray] = {(1, 1): root.labels.copy()}
    for depth in range(1, tree.max_depth):
        if not tree.has_level(depth + 1):
            break
        for i in range(1, 2 ** (depth - 1) + 1):
            node = tree.node(depth, i)
            assignment = split_pair(node.sq_a, node.sq_b, tree.points)
            for side in (Side.A, Side.B):
                ck = child_node(depth, i, side)
                out[ck] = child_labels(out[(depth, i)], assignment, side.value)
    return out
