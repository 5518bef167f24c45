"""Colored r-separated uniformly bounded decompositions of windows.

A :class:`ColoredCover` with d+1 colors whose pieces partition the window,
are pairwise > r apart within each color, and have diameter <= B witnesses
"asymptotic dimension <= d at scale r" on that window.  Constructions for
the line, the plane, and trees are provided alongside an independent
verifier and a greedy search.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .components import components_at_scale
from .errors import MalformedSpec, NotTreelike
from .spaces import (
    FreeGroupSpace,
    GridSpace,
    Space,
    TreeSpace,
    Window,
    scale_pairs,
    set_diameter,
)


@dataclass(frozen=True)
class ColoredCover:
    window: Window
    r: int
    bound: int
    colors: tuple  # tuple over colors; each color a tuple of point tuples

    @property
    def n_colors(self) -> int:
        return len(self.colors)

    def pieces(self):
        for c, fam in enumerate(self.colors):
            for k, piece in enumerate(fam):
                yield c, k, piece

    def to_json(self) -> dict:
        enc = self.window.space.point_to_json
        return {
            "r": self.r,
            "bound": self.bound,
            "colors": [
                [[enc(p) for p in piece] for piece in fam] for fam in self.colors
            ],
        }


@dataclass(frozen=True)
class CoverReport:
    partition_ok: bool
    separation_ok: bool
    bound_ok: bool
    witness: Optional[dict]

    @property
    def passed(self) -> bool:
        return self.partition_ok and self.separation_ok and self.bound_ok

    def to_json(self) -> dict:
        return {
            "partition_ok": self.partition_ok,
            "separation_ok": self.separation_ok,
            "bound_ok": self.bound_ok,
            "witness": self.witness,
            "passed": self.passed,
        }


def verify_decomposition(cover: ColoredCover) -> CoverReport:
    """Independent check of partition, same-color separation, and diameter bound."""
    w = cover.window
    enc = w.space.point_to_json
    witness = None

    n = len(w.points)
    color_of = np.full(n, -1, dtype=np.int64)
    piece_of = np.full(n, -1, dtype=np.int64)
    partition_ok = True
    pid = 0
    for c, _, piece in cover.pieces():
        for p in piece:
            i = w.index(p)  # raises UnknownPoint if outside the window
            if color_of[i] != -1:
                partition_ok = False
                if witness is None:
                    witness = {"kind": "overlap", "point": enc(p)}
            color_of[i] = c
            piece_of[i] = pid
        pid += 1
    if partition_ok and np.any(color_of == -1):
        partition_ok = False
        i = int(np.nonzero(color_of == -1)[0][0])
        if witness is None:
            witness = {"kind": "uncovered", "point": enc(w.points[i])}

    separation_ok = True
    ii, jj = scale_pairs(w, cover.r)
    if len(ii):
        bad = (
            (color_of[ii] == color_of[jj])
            & (color_of[ii] >= 0)
            & (piece_of[ii] != piece_of[jj])
        )
        if np.any(bad):
            separation_ok = False
            k = int(np.nonzero(bad)[0][0])
            if witness is None:
                a, b = w.points[int(ii[k])], w.points[int(jj[k])]
                witness = {
                    "kind": "separation",
                    "pair": [enc(a), enc(b)],
                    "distance": w.space.dist(a, b),
                }

    bound_ok = True
    for c, k, piece in cover.pieces():
        diam = set_diameter(w.space, piece)
        if diam > cover.bound:
            bound_ok = False
            if witness is None:
                witness = {
                    "kind": "bound",
                    "color": c,
                    "piece": k,
                    "diameter": diam,
                }
            break

    return CoverReport(partition_ok, separation_ok, bound_ok, witness)


def _group_pieces(w: Window, assign) -> tuple:
    """Assemble pieces from a point -> (color, piece key) classifier."""
    families: dict[int, dict] = {}
    for p in w.points:
        c, key = assign(p)
        families.setdefault(c, {}).setdefault(key, []).append(p)
    n_colors = max(families) + 1 if families else 0
    out = []
    for c in range(n_colors):
        fam = families.get(c, {})
        out.append(tuple(tuple(fam[k]) for k in sorted(fam)))
    return tuple(out)


def witness_line(r: int, w: Window) -> ColoredCover:
    """Two-color interval pattern on a window of Z: period 4r, pieces of 2r points."""
    if r < 1:
        raise MalformedSpec("scale must be >= 1")
    if not (isinstance(w.space, GridSpace) and w.space.dim == 1):
        raise MalformedSpec("witness_line expects a window of Z (grid dim 1)")

    def assign(p):
        x = p[0]
        u = x % (4 * r)
        k = x // (4 * r)
        return (0, k) if u < 2 * r else (1, k)

    colors = _group_pieces(w, assign)
    while len(colors) < 2:
        colors = colors + ((),)
    return ColoredCover(w, r, 2 * r - 1, colors)


def witness_grid2(r: int, w: Window) -> ColoredCover:
    """Three-color pattern on a window of Z^2 with cell size 10r: corner
    squares of half-width 3r, width-2r edge strips, and the leftover interior
    regions."""
    if r < 1:
        raise MalformedSpec("scale must be >= 1")
    if not (isinstance(w.space, GridSpace) and w.space.dim == 2):
        raise MalformedSpec("witness_grid2 expects a window of Z^2")
    L = 10 * r

    def offset(u):
        # position relative to the nearest gridline coordinate, in [-5r, 5r)
        t = (u + 5 * r) % L - 5 * r
        j = (u - t) // L
        return t, j

    def cell(u):
        # index of the cell [L*j + r, L*(j+1) - r) containing u
        return (u - r) // L

    def assign(p):
        x, y = p
        tx, jx = offset(x)
        ty, jy = offset(y)
        corner_x = -3 * r <= tx < 3 * r
        corner_y = -3 * r <= ty < 3 * r
        narrow_x = -r <= tx < r
        narrow_y = -r <= ty < r
        if corner_x and corner_y:
            return 0, (jx, jy)
        if narrow_y and not corner_x:
            return 1, ("h", cell(x), jy)
        if narrow_x and not corner_y:
            return 1, ("v", jx, cell(y))
        return 2, (cell(x), cell(y))

    colors = _group_pieces(w, assign)
    while len(colors) < 3:
        colors = colors + ((),)
    bound = max(
        (set_diameter(w.space, piece) for _, _, piece in ColoredCover(w, r, 0, colors).pieces()),
        default=0,
    )
    return ColoredCover(w, r, bound, colors)


def witness_tree(space: Space, root, r: int, w: Window) -> ColoredCover:
    """Two-color annulus pattern on a tree-like space: annuli of width 2r by
    distance from the root, colored by parity, pieces the r-chain components
    within each annulus."""
    if r < 1:
        raise MalformedSpec("scale must be >= 1")
    if not isinstance(space, (TreeSpace, FreeGroupSpace)):
        raise NotTreelike(f"witness_tree needs a tree or free_group space, got {space.kind}")
    if w.space is not space:
        raise MalformedSpec("window must live in the given space")
    root = space.normalize(root)
    n = len(w.points)
    annulus = np.array([space.dist(root, p) // (2 * r) for p in w.points], dtype=np.int64)

    # r-chain components inside each annulus
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    ii, jj = scale_pairs(w, r)
    for a, b in zip(ii, jj):
        if annulus[a] == annulus[b]:
            ra, rb = find(int(a)), find(int(b))
            if ra != rb:
                parent[rb] = ra

    groups: dict[int, list] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    families: dict[int, list] = {0: [], 1: []}
    for root_idx in sorted(groups):
        idxs = groups[root_idx]
        c = int(annulus[idxs[0]] % 2)
        families[c].append(tuple(w.points[i] for i in idxs))
    colors = (tuple(families[0]), tuple(families[1]))
    bound = max(
        (set_diameter(space, piece) for fam in colors for piece in fam), default=0
    )
    return ColoredCover(w, r, bound, colors)


def greedy_cover(w: Window, r: int, d: int, B: int) -> Optional[ColoredCover]:
    """First-fit search for a (d+1)-colored cover with bound B; returns None
    when the heuristic exhausts its options (this proves nothing)."""
    if d < 0 or B < 0:
        raise MalformedSpec("need d >= 0 and B >= 0")
    space = w.space
    if d == 0:
        part = components_at_scale(w, r)
        pieces = part.classes
        if any(set_diameter(space, c) > B for c in pieces):
            return None
        cover = ColoredCover(w, r, B, (pieces,))
        return cover if verify_decomposition(cover).passed else None

    # chunk the window into pieces of radius <= B // 2 around canonical seeds
    half = B // 2
    unassigned = set(w.points)
    pieces = []
    for p in w.points:
        if p not in unassigned:
            continue
        chunk = [q for q in w.points if q in unassigned and space.dist(p, q) <= half]
        for q in chunk:
            unassigned.discard(q)
        pieces.append(tuple(chunk))

    # neighbor lists at scale r for the color-conflict test
    ii, jj = scale_pairs(w, r)
    nbrs: dict[int, list[int]] = {}
    for a, b in zip(ii, jj):
        nbrs.setdefault(int(a), []).append(int(b))
        nbrs.setdefault(int(b), []).append(int(a))

    color_of = {}
    piece_of = {}
    families = [[] for _ in range(d + 1)]
    for k, piece in enumerate(pieces):
        placed = False
        for c in range(d + 1):
            conflict = False
            for p in piece:
                for j in nbrs.get(w.index(p), ()):  # window points within r
                    q = w.points[j]
                    if color_of.get(q) == c and piece_of.get(q) != k:
                        conflict = True
                        break
                if conflict:
                    break
            if not conflict:
                for p in piece:
                    color_of[p] = c
                    piece_of[p] = k
                families[c].append(piece)
                placed = True
                break
        if not placed:
            return None
    cover = ColoredCover(w, r, B, tuple(tuple(f) for f in families))
    return cover if verify_decomposition(cover).passed else None
