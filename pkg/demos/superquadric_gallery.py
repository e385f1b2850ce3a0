"""Sweep the two shape exponents and write a gallery OBJ.

Superquadrics interpolate between boxes (small exponents), ellipsoids
(exponents near 1), and pinched diamond-like solids (exponents near 2).
This script lays a 4x4 grid of them out on the xy plane and writes a single
grouped OBJ you can open in any mesh viewer, plus a quick text summary of
the inside-outside value at a fixed probe point so you can see the surface
tighten as the exponents shrink.

Run:  python demos/superquadric_gallery.py [out.obj]
"""

import sys

import numpy as np

from sqdecomp import SqPairNode, SqTree, Superquadric, export_level_obj, inside_outside

out_path = sys.argv[1] if len(sys.argv) > 1 else "gallery.obj"
exponents = [0.3, 0.7, 1.0, 1.7]

# A tree is just a container of SQ pairs, so a fake depth-4 level (8 pairs =
# 16 slots) comfortably holds the 4x4 grid of display shapes.
tree = SqTree(max_depth=4)
cells = []
for e1 in exponents:
    for e2 in exponents:
        cells.append(Superquadric((0.32, 0.25, 0.2), (e1, e2)))

probe = np.array([[0.3, 0.2, 0.1]])
print("e1\\e2  " + "  ".join(f"{e:5.2f}" for e in exponents))
for r, e1 in enumerate(exponents):
    row = [inside_outside(cells[r * 4 + c], probe)[0] for c in range(4)]
    print(f"{e1:5.2f}  " + "  ".join(f"{v:5.2f}" for v in row))
print("(inside-outside value at the fixed probe point; < 1 means inside)")

for d in range(1, 5):
    for i in range(1, 2 ** (d - 1) + 1):
        if d < 4:
            filler = Superquadric((0.01, 0.01, 0.01), (1.0, 1.0))
            tree.add_node(SqPairNode(depth=d, index=i, sq_a=filler, sq_b=filler))
        else:
            k = 2 * (i - 1)
            spots = [cells[k], cells[k + 1]]
            placed = []
            for j, sq in enumerate(spots):
                col, row = divmod(k + j, 4)
                placed.append(
                    Superquadric(
                        sq.size, sq.exponents, (0.9 * col - 1.35, 0.9 * row - 1.35, 0.0)
                    )
                )
            tree.add_node(SqPairNode(depth=4, index=i, sq_a=placed[0], sq_b=placed[1]))

export_level_obj(tree, 4, out_path, resolution=48)
print(f"wrote {out_path} (16 shapes, exponents {exponents} on both axes)")
