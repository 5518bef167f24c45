"""Bounded-geometry metric spaces with exact integer distances, and finite windows.

Every space kind provides an exact integer-valued distance oracle on canonical
point ids.  A :class:`Window` is a finite, canonically ordered subset of a space
carrying ambient distances; it is the universe for all downstream computations.
"""

from __future__ import annotations

import itertools
from bisect import bisect_left, bisect_right
from math import comb
from typing import Any, Iterable, Optional, Sequence

import numpy as np
from scipy import sparse

from .errors import (
    EnumerationOverflow,
    MalformedSpec,
    MetricViolation,
    UnknownPoint,
)

PointId = Any

BALL_CAP_DEFAULT = 2_000_000

_LETTERS = "abcdefghijklmnopqrstuvwxyz"


# ---------------------------------------------------------------------------
# reduced-word helpers (free groups)
# ---------------------------------------------------------------------------

def word_mul(u: str, v: str) -> str:
    """Reduced product of two reduced words (lowercase letter = generator,
    uppercase = its inverse)."""
    i = len(u)
    j = 0
    while i > 0 and j < len(v) and u[i - 1] == v[j].swapcase():
        i -= 1
        j += 1
    return u[:i] + v[j:]


def word_inv(u: str) -> str:
    return u[::-1].swapcase()


def word_dist(u: str, v: str) -> int:
    # |u^-1 v| = |u| + |v| - 2 * (longest common prefix)
    k = 0
    m = min(len(u), len(v))
    while k < m and u[k] == v[k]:
        k += 1
    return (len(u) - k) + (len(v) - k)


# ---------------------------------------------------------------------------
# space kinds
# ---------------------------------------------------------------------------

class Space:
    """Base class: an integer-valued metric space with a total distance oracle."""

    kind = "abstract"
    graph_like = False          # unit steps generate the metric
    geodesic_extension = False  # geodesics from any anchor extend past any point
    finite = False

    # -- points ------------------------------------------------------------
    def normalize(self, x) -> PointId:
        """Return the canonical encoding of ``x``, or raise UnknownPoint."""
        raise NotImplementedError

    def canonical_key(self, x):
        """Sort key inducing the canonical total order on points."""
        raise NotImplementedError

    def origin(self) -> PointId:
        raise NotImplementedError

    # -- metric ------------------------------------------------------------
    def dist(self, x, y) -> int:
        raise NotImplementedError

    def ball_points(self, x, r: int, cap: int = BALL_CAP_DEFAULT) -> list:
        """All points at distance <= r from x, no duplicates."""
        raise NotImplementedError

    def ball_size(self, x, r: int) -> int:
        return len(self.ball_points(x, r))

    def neighbors(self, x) -> list:
        """Unit-distance neighbors; only meaningful when ``graph_like``."""
        raise NotImplementedError(f"{self.kind} has no unit-step structure")

    def all_points(self) -> list:
        raise NotImplementedError(f"{self.kind} is not finite")

    def diameter(self) -> int:
        pts = self.all_points()
        best = 0
        for i, p in enumerate(pts):
            for q in pts[i + 1:]:
                d = self.dist(p, q)
                if d > best:
                    best = d
        return best

    # -- serialization -----------------------------------------------------
    def to_spec(self) -> dict:
        raise NotImplementedError

    def point_to_json(self, x):
        return x

    def spec_key(self):
        import json

        return json.dumps(self.to_spec(), sort_keys=True)

    def __repr__(self):
        return f"<{type(self).__name__} {self.to_spec()}>"


class GridSpace(Space):
    """Z^dim with the l1 word metric."""

    kind = "grid"
    graph_like = True
    geodesic_extension = True

    def __init__(self, dim: int):
        if not isinstance(dim, int) or dim < 1:
            raise MalformedSpec(f"grid dimension must be a positive integer, got {dim!r}")
        self.dim = dim

    def normalize(self, x):
        if isinstance(x, (list, tuple)) and len(x) == self.dim and all(
            isinstance(c, (int, np.integer)) for c in x
        ):
            return tuple(int(c) for c in x)
        if self.dim == 1 and isinstance(x, (int, np.integer)):
            return (int(x),)
        raise UnknownPoint(f"not a Z^{self.dim} point: {x!r}")

    def canonical_key(self, x):
        return x

    def origin(self):
        return (0,) * self.dim

    def dist(self, x, y):
        return sum(abs(a - b) for a, b in zip(x, y))

    def ball_size(self, x, r):
        # l1 ball cardinality in Z^d
        return sum((1 << k) * comb(self.dim, k) * comb(r, k) for k in range(min(self.dim, r) + 1))

    def ball_points(self, x, r, cap=BALL_CAP_DEFAULT):
        if self.ball_size(x, r) > cap:
            raise EnumerationOverflow(f"l1 ball of radius {r} in Z^{self.dim} exceeds cap {cap}")
        out = []

        def rec(i, budget, acc):
            if i == self.dim - 1:
                for o in range(-budget, budget + 1):
                    out.append(acc + (x[i] + o,))
                return
            for o in range(-budget, budget + 1):
                rec(i + 1, budget - abs(o), acc + (x[i] + o,))

        rec(0, r, ())
        return out

    def neighbors(self, x):
        out = []
        for i in range(self.dim):
            for s in (1, -1):
                out.append(x[:i] + (x[i] + s,) + x[i + 1:])
        return out

    def to_spec(self):
        return {"kind": "grid", "dim": self.dim}

    def point_to_json(self, x):
        return list(x)


class FreeGroupSpace(Space):
    """Free group of finite rank with the word metric on reduced words.

    Points are strings: lowercase letters are generators, uppercase their
    inverses, "" is the identity.
    """

    kind = "free_group"
    graph_like = True
    geodesic_extension = True

    def __init__(self, rank: int):
        if not isinstance(rank, int) or rank < 1 or rank > 26:
            raise MalformedSpec(f"free_group rank must be in 1..26, got {rank!r}")
        self.rank = rank
        self.letters = [c for g in _LETTERS[:rank] for c in (g, g.upper())]
        self._letterset = set(self.letters)

    def normalize(self, x):
        if not isinstance(x, str):
            raise UnknownPoint(f"free group points are strings, got {x!r}")
        for c in x:
            if c not in self._letterset:
                raise UnknownPoint(f"letter {c!r} not valid for rank {self.rank}")
        for a, b in zip(x, x[1:]):
            if a == b.swapcase():
                raise UnknownPoint(f"word {x!r} is not reduced")
        return x

    def canonical_key(self, x):
        return (len(x), x)

    def origin(self):
        return ""

    def dist(self, x, y):
        return word_dist(x, y)

    def ball_size(self, x, r):
        k = self.rank
        total = 1
        sphere = 2 * k
        for _ in range(r):
            total += sphere
            sphere *= 2 * k - 1
        return total

    def ball_points(self, x, r, cap=BALL_CAP_DEFAULT):
        if self.ball_size(x, r) > cap:
            raise EnumerationOverflow(f"free group ball of radius {r} exceeds cap {cap}")
        seen = {x}
        frontier = [x]
        out = [x]
        for _ in range(r):
            nxt = []
            for w in frontier:
                for s in self.letters:
                    y = word_mul(w, s)
                    if y not in seen:
                        seen.add(y)
                        out.append(y)
                        nxt.append(y)
            frontier = nxt
        return out

    def neighbors(self, x):
        return [word_mul(x, s) for s in self.letters]

    def to_spec(self):
        return {"kind": "free_group", "rank": self.rank}


class TreeSpace(Space):
    """A tree: either the infinite rooted b-ary tree (vertex ids are ints,
    children of v are b*v+1..b*v+b) or a finite tree given by an edge list."""

    kind = "tree"
    graph_like = True

    def __init__(self, branching: Optional[int] = None, edges: Optional[Sequence] = None):
        if (branching is None) == (edges is None):
            raise MalformedSpec("tree needs exactly one of 'branching' or 'edges'")
        if branching is not None:
            if not isinstance(branching, int) or branching < 1:
                raise MalformedSpec(f"branching must be a positive integer, got {branching!r}")
            self.branching = branching
            self.edges = None
            self.geodesic_extension = True
            self._adj = None
            self.n_vertices = None
        else:
            edges = [tuple(e) for e in edges]
            verts = {v for e in edges for v in e}
            n = (max(verts) + 1) if verts else 1
            if len(edges) != n - 1:
                raise MalformedSpec("edge list does not describe a tree (|E| != |V|-1)")
            adj = [[] for _ in range(n)]
            for a, b in edges:
                if not (isinstance(a, int) and isinstance(b, int) and 0 <= a < n and 0 <= b < n):
                    raise MalformedSpec(f"bad edge {(a, b)!r}")
                adj[a].append(b)
                adj[b].append(a)
            # connectivity check
            seen = {0}
            stack = [0]
            while stack:
                v = stack.pop()
                for u in adj[v]:
                    if u not in seen:
                        seen.add(u)
                        stack.append(u)
            if len(seen) != n:
                raise MalformedSpec("edge list is not connected")
            self.branching = None
            self.edges = edges
            self.n_vertices = n
            self._adj = [sorted(a) for a in adj]
            self.finite = True
            self._dist_cache: dict[int, dict[int, int]] = {}

    # -- infinite b-ary helpers
    def _parent(self, v):
        return (v - 1) // self.branching

    def depth(self, v):
        d = 0
        while v > 0:
            v = self._parent(v)
            d += 1
        return d

    def normalize(self, x):
        if isinstance(x, (int, np.integer)) and x >= 0:
            x = int(x)
            if self.branching is None and x >= self.n_vertices:
                raise UnknownPoint(f"vertex {x} outside tree of size {self.n_vertices}")
            return x
        raise UnknownPoint(f"tree points are nonnegative ints, got {x!r}")

    def canonical_key(self, x):
        return x

    def origin(self):
        return 0

    def dist(self, x, y):
        if self.branching is not None:
            d = 0
            dx, dy = self.depth(x), self.depth(y)
            while dx > dy:
                x = self._parent(x)
                dx -= 1
                d += 1
            while dy > dx:
                y = self._parent(y)
                dy -= 1
                d += 1
            while x != y:
                x = self._parent(x)
                y = self._parent(y)
                d += 2
            return d
        lengths = self._bfs(x)
        return lengths[y]

    def _bfs(self, src, cutoff=None):
        if self.branching is None and cutoff is None:
            cached = self._dist_cache.get(src)
            if cached is not None:
                return cached
        lengths = {src: 0}
        frontier = [src]
        level = 0
        while frontier and (cutoff is None or level < cutoff):
            level += 1
            nxt = []
            for v in frontier:
                for u in self.neighbors(v):
                    if u not in lengths:
                        lengths[u] = level
                        nxt.append(u)
            frontier = nxt
        if self.branching is None and cutoff is None:
            self._dist_cache[src] = lengths
        return lengths

    def neighbors(self, x):
        if self.branching is not None:
            b = self.branching
            out = [] if x == 0 else [self._parent(x)]
            out.extend(b * x + i for i in range(1, b + 1))
            return out
        return list(self._adj[x])

    def ball_points(self, x, r, cap=BALL_CAP_DEFAULT):
        lengths = self._bfs(x, cutoff=r)
        pts = sorted(lengths)
        if len(pts) > cap:
            raise EnumerationOverflow(f"tree ball of radius {r} exceeds cap {cap}")
        return pts

    def ball_size(self, x, r):
        return len(self._bfs(x, cutoff=r))

    def all_points(self):
        if self.branching is not None:
            raise NotImplementedError("infinite tree")
        return list(range(self.n_vertices))

    def to_spec(self):
        if self.branching is not None:
            return {"kind": "tree", "branching": self.branching}
        return {"kind": "tree", "edges": [list(e) for e in self.edges]}


class PointLineSpace(Space):
    """A finite subset of Z with the induced |x - y| metric."""

    kind = "point_line"
    finite = True

    def __init__(self, coords: Sequence[int]):
        coords = list(coords)
        if not coords or not all(isinstance(c, (int, np.integer)) for c in coords):
            raise MalformedSpec("point_line needs a nonempty list of integers")
        coords = [int(c) for c in coords]
        if any(a >= b for a, b in zip(coords, coords[1:])):
            raise MalformedSpec("point_line coordinates must be strictly increasing")
        self.coords = coords
        self._set = set(coords)

    def normalize(self, x):
        if isinstance(x, (int, np.integer)) and int(x) in self._set:
            return int(x)
        raise UnknownPoint(f"{x!r} is not a coordinate of this point_line")

    def canonical_key(self, x):
        return x

    def origin(self):
        return self.coords[0]

    def dist(self, x, y):
        return abs(x - y)

    def ball_points(self, x, r, cap=BALL_CAP_DEFAULT):
        lo = bisect_left(self.coords, x - r)
        hi = bisect_right(self.coords, x + r)
        return self.coords[lo:hi]

    def all_points(self):
        return list(self.coords)

    def diameter(self):
        return self.coords[-1] - self.coords[0]

    def to_spec(self):
        return {"kind": "point_line", "coords": list(self.coords)}


class DisjointUnionSpace(Space):
    """Disjoint union of finite blocks laid out along a line.

    Within block k the block's own metric is used.  Across blocks k < l the
    distance is constant:

        d = sum(gaps[k:l]) + sum(diam(block_j) for j in k..l)

    including both endpoint diameters, which is what makes the triangle
    inequality hold for arbitrary block shapes.  Points are (block, inner).
    """

    kind = "disjoint_union"
    finite = True

    def __init__(self, blocks: Sequence[Space], gaps: Sequence[int]):
        if not blocks:
            raise MalformedSpec("disjoint_union needs at least one block")
        for b in blocks:
            if not b.finite:
                raise MalformedSpec("disjoint_union blocks must be finite spaces")
        gaps = list(gaps)
        if len(gaps) != len(blocks) - 1:
            raise MalformedSpec(
                f"need exactly {len(blocks) - 1} gaps for {len(blocks)} blocks, got {len(gaps)}"
            )
        if not all(isinstance(g, (int, np.integer)) and g >= 1 for g in gaps):
            raise MalformedSpec("gaps must be integers >= 1")
        self.blocks = list(blocks)
        self.gaps = [int(g) for g in gaps]
        self.diams = [b.diameter() for b in blocks]
        # prefix sums: cross-block distance in O(1)
        self._pg = [0]
        for g in self.gaps:
            self._pg.append(self._pg[-1] + g)
        self._pd = [0]
        for d in self.diams:
            self._pd.append(self._pd[-1] + d)

    def block_distance(self, k: int, l: int) -> int:
        if k == l:
            return 0
        if k > l:
            k, l = l, k
        return (self._pg[l] - self._pg[k]) + (self._pd[l + 1] - self._pd[k])

    def normalize(self, x):
        if isinstance(x, (list, tuple)) and len(x) == 2:
            k, inner = x
            if isinstance(k, (int, np.integer)) and 0 <= int(k) < len(self.blocks):
                k = int(k)
                return (k, self.blocks[k].normalize(inner))
        raise UnknownPoint(f"disjoint_union points are (block, inner), got {x!r}")

    def canonical_key(self, x):
        k, inner = x
        return (k, self.blocks[k].canonical_key(inner))

    def origin(self):
        return (0, self.blocks[0].origin())

    def dist(self, x, y):
        (k, a), (l, b) = x, y
        if k == l:
            return self.blocks[k].dist(a, b)
        return self.block_distance(k, l)

    def ball_points(self, x, r, cap=BALL_CAP_DEFAULT):
        k, a = x
        out = [(k, p) for p in self.blocks[k].ball_points(a, r, cap=cap)]
        for l, blk in enumerate(self.blocks):
            if l != k and self.block_distance(k, l) <= r:
                out.extend((l, p) for p in blk.all_points())
        if len(out) > cap:
            raise EnumerationOverflow(f"disjoint_union ball exceeds cap {cap}")
        return out

    def all_points(self):
        return [(k, p) for k, blk in enumerate(self.blocks) for p in blk.all_points()]

    def to_spec(self):
        return {
            "kind": "disjoint_union",
            "blocks": [b.to_spec() for b in self.blocks],
            "gaps": list(self.gaps),
        }

    def point_to_json(self, x):
        k, a = x
        return [k, self.blocks[k].point_to_json(a)]


class ProductFiniteSpace(Space):
    """base x {1..n} with the sum of the base metric and the 0/1 discrete metric."""

    kind = "product_finite"

    def __init__(self, base: Space, n: int):
        if not isinstance(n, int) or n < 1:
            raise MalformedSpec(f"product level count must be a positive integer, got {n!r}")
        self.base = base
        self.n = n
        self.finite = base.finite
        self.graph_like = base.graph_like
        self.geodesic_extension = base.geodesic_extension

    def normalize(self, x):
        if isinstance(x, (list, tuple)) and len(x) == 2:
            b, lvl = x
            if isinstance(lvl, (int, np.integer)) and 1 <= int(lvl) <= self.n:
                return (self.base.normalize(b), int(lvl))
        raise UnknownPoint(f"product points are (base, level 1..{self.n}), got {x!r}")

    def canonical_key(self, x):
        b, lvl = x
        return (self.base.canonical_key(b), lvl)

    def origin(self):
        return (self.base.origin(), 1)

    def dist(self, x, y):
        (a, i), (b, j) = x, y
        return self.base.dist(a, b) + (0 if i == j else 1)

    def ball_points(self, x, r, cap=BALL_CAP_DEFAULT):
        a, i = x
        out = [(p, i) for p in self.base.ball_points(a, r, cap=cap)]
        if r >= 1:
            inner = self.base.ball_points(a, r - 1, cap=cap)
            for j in range(1, self.n + 1):
                if j != i:
                    out.extend((p, j) for p in inner)
        if len(out) > cap:
            raise EnumerationOverflow(f"product ball exceeds cap {cap}")
        return out

    def ball_size(self, x, r):
        a, _ = x
        s = self.base.ball_size(a, r)
        if r >= 1:
            s += (self.n - 1) * self.base.ball_size(a, r - 1)
        return s

    def neighbors(self, x):
        a, i = x
        out = [(p, i) for p in self.base.neighbors(a)]
        out.extend((a, j) for j in range(1, self.n + 1) if j != i)
        return out

    def all_points(self):
        return [(p, j) for p in self.base.all_points() for j in range(1, self.n + 1)]

    def to_spec(self):
        return {"kind": "product_finite", "base": self.base.to_spec(), "n": self.n}

    def point_to_json(self, x):
        b, lvl = x
        return [self.base.point_to_json(b), lvl]


class CustomSpace(Space):
    """A finite space given by an explicit symmetric integer distance table."""

    kind = "custom"
    finite = True

    def __init__(self, points: Sequence, table):
        points = list(points)
        if not points:
            raise MalformedSpec("custom space needs at least one point")
        if len(set(points)) != len(points):
            raise MalformedSpec("custom point ids must be distinct")
        D = np.asarray(table)
        n = len(points)
        if D.shape != (n, n):
            raise MalformedSpec(f"distance table must be {n}x{n}, got {D.shape}")
        if not np.issubdtype(D.dtype, np.integer):
            Df = np.asarray(table, dtype=float)
            if not np.all(Df == np.round(Df)):
                raise MalformedSpec("distance table entries must be integers")
            D = Df.astype(np.int64)
        D = D.astype(np.int64)
        if np.any(D < 0):
            raise MetricViolation("negative distance in table")
        if np.any(np.diag(D) != 0):
            i = int(np.nonzero(np.diag(D))[0][0])
            raise MetricViolation(f"d({points[i]!r},{points[i]!r}) != 0", witness=(points[i],))
        off = D + np.eye(n, dtype=np.int64)
        if np.any(off == 0):
            i, j = map(int, np.argwhere(off == 0)[0])
            raise MetricViolation(
                f"distinct points {points[i]!r}, {points[j]!r} at distance 0",
                witness=(points[i], points[j]),
            )
        if np.any(D != D.T):
            i, j = map(int, np.argwhere(D != D.T)[0])
            raise MetricViolation(
                f"asymmetry between {points[i]!r} and {points[j]!r}",
                witness=(points[i], points[j]),
            )
        for k in range(n):
            bad = D > D[:, [k]] + D[[k], :]
            if np.any(bad):
                i, j = map(int, np.argwhere(bad)[0])
                raise MetricViolation(
                    f"triangle inequality fails: d({points[i]!r},{points[j]!r}) > "
                    f"d({points[i]!r},{points[k]!r}) + d({points[k]!r},{points[j]!r})",
                    witness=(points[i], points[k], points[j]),
                )
        self.points = points
        self.table = D
        self._pos = {p: i for i, p in enumerate(points)}

    def normalize(self, x):
        if isinstance(x, np.integer):
            x = int(x)
        if x in self._pos:
            return x
        raise UnknownPoint(f"{x!r} is not a point of this custom space")

    def canonical_key(self, x):
        return self._pos[x]

    def origin(self):
        return self.points[0]

    def dist(self, x, y):
        return int(self.table[self._pos[x], self._pos[y]])

    def ball_points(self, x, r, cap=BALL_CAP_DEFAULT):
        i = self._pos[x]
        return [p for j, p in enumerate(self.points) if self.table[i, j] <= r]

    def all_points(self):
        return list(self.points)

    def diameter(self):
        return int(self.table.max())

    def to_spec(self):
        return {
            "kind": "custom",
            "points": list(self.points),
            "dist": self.table.tolist(),
        }


def make_space(spec: dict) -> Space:
    """Build a space handle from its JSON-style specification."""
    if isinstance(spec, Space):
        return spec
    if not isinstance(spec, dict) or "kind" not in spec:
        raise MalformedSpec(f"space spec must be a dict with a 'kind' key, got {spec!r}")
    kind = spec["kind"]
    try:
        if kind == "grid":
            return GridSpace(spec["dim"])
        if kind == "free_group":
            return FreeGroupSpace(spec["rank"])
        if kind == "tree":
            return TreeSpace(branching=spec.get("branching"), edges=spec.get("edges"))
        if kind == "point_line":
            return PointLineSpace(spec["coords"])
        if kind == "disjoint_union":
            blocks = [make_space(b) for b in spec["blocks"]]
            return DisjointUnionSpace(blocks, spec["gaps"])
        if kind == "product_finite":
            return ProductFiniteSpace(make_space(spec["base"]), spec["n"])
        if kind == "custom":
            return CustomSpace(spec["points"], spec["dist"])
    except KeyError as exc:
        raise MalformedSpec(f"{kind} spec missing field {exc}") from exc
    raise MalformedSpec(f"unknown space kind {kind!r}")


# ---------------------------------------------------------------------------
# windows
# ---------------------------------------------------------------------------

class Window:
    """A finite ordered subset of a space, with ambient (not induced) distances."""

    def __init__(self, space: Space, points: Iterable, ball_center=None, ball_radius=None):
        pts = [space.normalize(p) for p in points]
        keyed = sorted({space.canonical_key(p): p for p in pts}.items())
        self.space = space
        self.points = tuple(p for _, p in keyed)
        self._index = {p: i for i, p in enumerate(self.points)}
        self.ball_center = space.normalize(ball_center) if ball_center is not None else None
        self.ball_radius = ball_radius

    def __len__(self):
        return len(self.points)

    def __contains__(self, p):
        return p in self._index

    def index(self, p) -> int:
        try:
            return self._index[p]
        except KeyError:
            raise UnknownPoint(f"{p!r} is not in this window") from None

    def dist(self, x, y) -> int:
        return self.space.dist(x, y)

    @property
    def is_ball(self) -> bool:
        return self.ball_center is not None and self.ball_radius is not None

    def subwindow(self, points) -> "Window":
        return Window(self.space, points)

    def interior(self, r: int) -> tuple:
        """Points whose ambient r-ball lies entirely inside the window."""
        if r <= 0:
            return self.points
        s = self.space
        if self.is_ball and s.geodesic_extension:
            if self.ball_radius < r:
                return ()
            c = self.ball_center
            return tuple(p for p in self.points if s.dist(c, p) <= self.ball_radius - r)
        counts = np.zeros(len(self.points), dtype=np.int64)
        ii, jj = scale_pairs(self, r)
        np.add.at(counts, ii, 1)
        np.add.at(counts, jj, 1)
        out = []
        for i, p in enumerate(self.points):
            if counts[i] + 1 == s.ball_size(p, r):
                out.append(p)
        return tuple(out)

    def to_json(self) -> dict:
        if self.is_ball:
            return {
                "ball": {
                    "center": self.space.point_to_json(self.ball_center),
                    "radius": self.ball_radius,
                }
            }
        return {"points": [self.space.point_to_json(p) for p in self.points]}

    def __repr__(self):
        return f"<Window of {self.space.kind}, {len(self.points)} points>"


def ball(space: Space, x, r: int, cap: int = BALL_CAP_DEFAULT) -> Window:
    """The radius-r ball around x, as a window."""
    if r < 0:
        raise MalformedSpec("ball radius must be >= 0")
    x = space.normalize(x)
    pts = space.ball_points(x, r, cap=cap)
    return Window(space, pts, ball_center=x, ball_radius=r)


def window_from_json(space: Space, data: dict) -> Window:
    if "ball" in data:
        b = data["ball"]
        return ball(space, b["center"], b["radius"])
    if "points" in data:
        return Window(space, data["points"])
    raise MalformedSpec(f"window spec needs 'ball' or 'points', got {data!r}")


def dist(space: Space, x, y) -> int:
    """Exact ambient distance between two valid points."""
    return space.dist(space.normalize(x), space.normalize(y))


# ---------------------------------------------------------------------------
# pair enumeration at a scale (the workhorse for components / covers / flows)
# ---------------------------------------------------------------------------

_ALL_PAIRS_GUARD = 4000


def scale_pairs(w: Window, r: int):
    """All index pairs (i, j), i < j, with d(points[i], points[j]) <= r.

    Returns a pair of int arrays.  Strategy is chosen per space kind; every
    strategy computes the exact ambient relation.
    """
    n = len(w.points)
    empty = (np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64))
    if n <= 1 or r <= 0:
        return empty
    s = w.space
    if isinstance(s, GridSpace):
        return _pairs_grid(w, r)
    if isinstance(s, (PointLineSpace, CustomSpace)):
        return _pairs_dense_coords(w, r)
    if isinstance(s, (FreeGroupSpace, TreeSpace)) and s.graph_like:
        if w.is_ball:
            return _pairs_graph_power(w, r)
        if s.ball_size(w.points[0], r) <= max(64, 4 * n):
            return _pairs_point_balls(w, r)
    if isinstance(s, DisjointUnionSpace):
        return _pairs_disjoint(w, r)
    return _pairs_bruteforce(w, r)


def _pairs_grid(w: Window, r: int):
    s = w.space
    n = len(w.points)
    coords = np.array(w.points, dtype=np.int64)
    if s.ball_size(w.points[0], r) > max(64, 4 * n):
        return _pairs_dense_coords(w, r)
    mins = coords.min(axis=0)
    spans = coords.max(axis=0) - mins + 2 * r + 1
    strides = np.ones(s.dim, dtype=np.int64)
    for i in range(s.dim - 2, -1, -1):
        strides[i] = strides[i + 1] * spans[i + 1]
    codes = (coords - mins + r) @ strides
    order = np.argsort(codes, kind="stable")
    sorted_codes = codes[order]
    offsets = [
        o
        for o in s.ball_points((0,) * s.dim, r)
        if any(c != 0 for c in o) and o > (0,) * s.dim
    ]
    out_i, out_j = [], []
    for o in offsets:
        shift = np.asarray(o, dtype=np.int64) @ strides
        targets = codes + shift
        pos = np.searchsorted(sorted_codes, targets)
        pos_c = np.clip(pos, 0, n - 1)
        hit = sorted_codes[pos_c] == targets
        src = np.nonzero(hit)[0]
        dst = order[pos_c[hit]]
        out_i.append(np.minimum(src, dst))
        out_j.append(np.maximum(src, dst))
    if not out_i:
        return (np.empty(0, dtype=np.int64),) * 2
    return np.concatenate(out_i), np.concatenate(out_j)


def _pairs_dense_coords(w: Window, r: int):
    s = w.space
    n = len(w.points)
    if isinstance(s, CustomSpace):
        idx = np.array([s._pos[p] for p in w.points])
        D = s.table[np.ix_(idx, idx)]
    elif isinstance(s, PointLineSpace):
        c = np.array(w.points, dtype=np.int64)
        D = np.abs(c[:, None] - c[None, :])
    else:
        coords = np.array(w.points, dtype=np.int64)
        if n > _ALL_PAIRS_GUARD:
            return _pairs_bruteforce(w, r)
        D = np.abs(coords[:, None, :] - coords[None, :, :]).sum(axis=2)
    ii, jj = np.nonzero(np.triu(D <= r, k=1))
    return ii.astype(np.int64), jj.astype(np.int64)


def _pairs_graph_power(w: Window, r: int):
    # windows that are metric balls in tree-like graph spaces: window BFS
    # distance equals ambient distance, so boolean powers of the unit
    # adjacency enumerate the <= r relation exactly
    s = w.space
    n = len(w.points)
    rows, cols = [], []
    for i, p in enumerate(w.points):
        for q in s.neighbors(p):
            j = w._index.get(q)
            if j is not None and j != i:
                rows.append(i)
                cols.append(j)
    A = sparse.csr_matrix(
        (np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(n, n)
    )
    M = (A + sparse.identity(n, dtype=np.int8, format="csr")).astype(bool)
    P = M
    for _ in range(r - 1):
        P = (P @ M).astype(bool)
    coo = sparse.triu(P, k=1).tocoo()
    return coo.row.astype(np.int64), coo.col.astype(np.int64)


def _pairs_point_balls(w: Window, r: int):
    s = w.space
    out_i, out_j = [], []
    for i, p in enumerate(w.points):
        for q in s.ball_points(p, r):
            j = w._index.get(q)
            if j is not None and j > i:
                out_i.append(i)
                out_j.append(j)
    return np.array(out_i, dtype=np.int64), np.array(out_j, dtype=np.int64)


def _pairs_disjoint(w: Window, r: int):
    s = w.space
    by_block: dict[int, list[int]] = {}
    for i, (k, _) in enumerate(w.points):
        by_block.setdefault(k, []).append(i)
    out_i, out_j = [], []
    for k, idxs in by_block.items():
        sub = Window(s.blocks[k], [w.points[i][1] for i in idxs])
        # window indices follow the same canonical order as the sub-window
        back = sorted(idxs, key=lambda i: s.blocks[k].canonical_key(w.points[i][1]))
        si, sj = scale_pairs(sub, r)
        for a, b in zip(si, sj):
            out_i.append(back[a])
            out_j.append(back[b])
    blocks = sorted(by_block)
    for a_pos, k in enumerate(blocks):
        for l in blocks[a_pos + 1:]:
            if s.block_distance(k, l) <= r:
                for i in by_block[k]:
                    for j in by_block[l]:
                        out_i.append(min(i, j))
                        out_j.append(max(i, j))
    return np.array(out_i, dtype=np.int64), np.array(out_j, dtype=np.int64)


def _pairs_bruteforce(w: Window, r: int):
    s = w.space
    pts = w.points
    out_i, out_j = [], []
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            if s.dist(pts[i], pts[j]) <= r:
                out_i.append(i)
                out_j.append(j)
    return np.array(out_i, dtype=np.int64), np.array(out_j, dtype=np.int64)


# ---------------------------------------------------------------------------
# window-level diagnostics
# ---------------------------------------------------------------------------

def bounded_geometry_profile(w: Window, r: int) -> int:
    """max over x in w of |B_r(x) ∩ w|."""
    if r < 0:
        raise MalformedSpec("scale must be >= 0")
    if len(w.points) == 0:
        return 0
    counts = np.zeros(len(w.points), dtype=np.int64)
    ii, jj = scale_pairs(w, r)
    np.add.at(counts, ii, 1)
    np.add.at(counts, jj, 1)
    return int(counts.max()) + 1


def verify_metric(w: Window, cap: int = 300) -> dict:
    """Exhaustively check the metric axioms on a window (|w| <= cap)."""
    pts = w.points
    n = len(pts)
    if n > cap:
        raise MalformedSpec(f"window of size {n} exceeds exhaustive-check cap {cap}")
    s = w.space
    D = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        for j in range(i + 1, n):
            D[i, j] = D[j, i] = s.dist(pts[i], pts[j])
    report = {"symmetry": True, "identity": True, "triangle": True, "witness": None}
    if np.any(D < 0):
        report["identity"] = False
    off = D + np.eye(n, dtype=np.int64)
    if np.any(off == 0):
        i, j = map(int, np.argwhere(off == 0)[0])
        report["identity"] = False
        report["witness"] = (pts[i], pts[j])
    for k in range(n):
        bad = D > D[:, [k]] + D[[k], :]
        if np.any(bad):
            i, j = map(int, np.argwhere(bad)[0])
            report["triangle"] = False
            report["witness"] = (pts[i], pts[k], pts[j])
            break
    report["ok"] = report["symmetry"] and report["identity"] and report["triangle"]
    return report


def window_diameter(w: Window) -> int:
    """Exact diameter of a window, with fast paths per kind."""
    return set_diameter(w.space, w.points)


def set_diameter(space: Space, pts: Sequence) -> int:
    """Exact diameter of a finite point set under the ambient metric."""
    pts = list(pts)
    if len(pts) <= 1:
        return 0
    if isinstance(space, GridSpace):
        coords = np.array(pts, dtype=np.int64)
        best = 0
        # l1 diameter via signed coordinate sums (l1 = rotated l-infinity)
        for signs in itertools.product((1, -1), repeat=space.dim - 1):
            proj = coords[:, 0] + sum(
                s * coords[:, i + 1] for i, s in enumerate(signs)
            )
            best = max(best, int(proj.max() - proj.min()))
        return best
    if isinstance(space, PointLineSpace):
        return max(pts) - min(pts)
    if isinstance(space, (FreeGroupSpace, TreeSpace)):
        # double sweep is exact for tree metrics
        a = max(pts, key=lambda q: space.dist(pts[0], q))
        b = max(pts, key=lambda q: space.dist(a, q))
        return space.dist(a, b)
    best = 0
    for i, p in enumerate(pts):
        for q in pts[i + 1:]:
            d = space.dist(p, q)
            if d > best:
                best = d
    return best
