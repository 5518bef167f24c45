"""Folner-set search, isoperimetric profiling, paradoxical decompositions,
doubling matchings on windows, transport along maps, and growth profiles.

Finite sets are never paradoxical, so window-level non-amenability evidence
takes the form of a 2-to-1 doubling matching from the r-interior into the
window (a Hall-condition certificate).  Exact partition-style decompositions
are produced only for rule-based infinite families (free groups) and their
transports.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Optional

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import maximum_flow

from .errors import (
    EnumerationOverflow,
    ExpansionUnbounded,
    CapExceeded,
    MalformedSpec,
    NotInjective,
    RankTooSmall,
)
from .maps import CoarseMap
from .spaces import FreeGroupSpace, Space, Window, scale_pairs, word_mul


# ---------------------------------------------------------------------------
# partial translations and paradoxical decompositions
# ---------------------------------------------------------------------------

class PartialTranslation:
    """A bounded-displacement bijection between two subsets, stored as pairs."""

    def __init__(self, space: Space, pairs):
        pairs = [(space.normalize(a), space.normalize(b)) for a, b in pairs]
        dom = [a for a, _ in pairs]
        cod = [b for _, b in pairs]
        if len(set(dom)) != len(dom) or len(set(cod)) != len(cod):
            raise MalformedSpec("pairing is not a bijection")
        self.space = space
        self.pairs = tuple(sorted(pairs, key=lambda ab: space.canonical_key(ab[0])))
        self._map = dict(self.pairs)

    @property
    def domain(self):
        return tuple(a for a, _ in self.pairs)

    @property
    def codomain(self):
        return tuple(b for _, b in self.pairs)

    @property
    def displacement(self) -> int:
        return max((self.space.dist(a, b) for a, b in self.pairs), default=0)

    def __call__(self, x):
        return self._map[x]

    def to_json(self):
        enc = self.space.point_to_json
        return {"pairs": [[enc(a), enc(b)] for a, b in self.pairs]}


@dataclass
class ParadoxicalDecomposition:
    """Carrier A = A_+ |_| A_- with partial translations t_+/- : A -> A_+/-.

    Membership predicates and the translation rules are callables so that the
    same object can describe either a closed-form rule on an infinite space or
    an explicit window-materialized decomposition.  Translations may return
    None where they are undefined (possible near the boundary of transported
    decompositions)."""

    space: Space
    displacement: int
    in_carrier: Callable[[Any], bool]
    in_plus: Callable[[Any], bool]
    in_minus: Callable[[Any], bool]
    t_plus: Callable[[Any], Optional[Any]]
    t_minus: Callable[[Any], Optional[Any]]
    tag: str = ""

    def materialize(self, w: Window) -> dict:
        """Explicit pair lists on a window, for serialization and re-checking.
        Pairs whose image leaves the window are dropped (the membership sets
        are window-clipped, so keeping them would break containment)."""
        enc = self.space.point_to_json
        carrier = [p for p in w.points if self.in_carrier(p)]
        plus = [p for p in carrier if self.in_plus(p)]
        minus = [p for p in carrier if self.in_minus(p)]
        tp = [
            (p, self.t_plus(p))
            for p in carrier
            if self.t_plus(p) is not None and self.t_plus(p) in w
        ]
        tm = [
            (p, self.t_minus(p))
            for p in carrier
            if self.t_minus(p) is not None and self.t_minus(p) in w
        ]
        return {
            "displacement": self.displacement,
            "carrier": [enc(p) for p in carrier],
            "plus": [enc(p) for p in plus],
            "minus": [enc(p) for p in minus],
            "t_plus": [[enc(a), enc(b)] for a, b in tp],
            "t_minus": [[enc(a), enc(b)] for a, b in tm],
            "tag": self.tag,
        }


def paradox_from_pairs(space, displacement, plus, minus, t_plus_pairs, t_minus_pairs, tag=""):
    """Window-materialized decomposition from explicit sets and pair lists."""
    plus = frozenset(space.normalize(p) for p in plus)
    minus = frozenset(space.normalize(p) for p in minus)
    carrier = plus | minus
    mp = {space.normalize(a): space.normalize(b) for a, b in t_plus_pairs}
    mm = {space.normalize(a): space.normalize(b) for a, b in t_minus_pairs}
    return ParadoxicalDecomposition(
        space=space,
        displacement=displacement,
        in_carrier=lambda x: x in carrier,
        in_plus=lambda x: x in plus,
        in_minus=lambda x: x in minus,
        t_plus=mp.get,
        t_minus=mm.get,
        tag=tag,
    )


def _ab_suffix(word: str) -> str:
    i = len(word)
    while i > 0 and word[i - 1] in "aAbB":
        i -= 1
    return word[i:]


def paradox_free_group(rank: int) -> ParadoxicalDecomposition:
    """The displacement-1 rule on the free group of the given rank.

    Splitting by the final letter of the maximal {a, b}-suffix s(x):
    A_+ collects words with s(x) ending in a or a^-1 together with those with
    empty suffix (in rank 2 that is exactly the identity); A_- collects words
    with s(x) ending in b or b^-1.  t_+ fixes x when s(x) ends in a^-1 or is a
    power of a, and right-multiplies by a otherwise; t_- fixes x when s(x)
    ends in b^-1 and right-multiplies by b otherwise.  Both are bijections
    onto their parts, coset by coset.
    """
    if not isinstance(rank, int) or rank < 2:
        raise RankTooSmall(f"need rank >= 2, got {rank!r}")
    space = FreeGroupSpace(rank)

    def in_plus(x):
        s = _ab_suffix(x)
        return s == "" or s[-1] in "aA"

    def in_minus(x):
        s = _ab_suffix(x)
        return s != "" and s[-1] in "bB"

    def t_plus(x):
        s = _ab_suffix(x)
        if (s and s[-1] == "A") or all(c == "a" for c in s):
            return x
        return word_mul(x, "a")

    def t_minus(x):
        s = _ab_suffix(x)
        if s and s[-1] == "B":
            return x
        return word_mul(x, "b")

    return ParadoxicalDecomposition(
        space=space,
        displacement=1,
        in_carrier=lambda x: True,
        in_plus=in_plus,
        in_minus=in_minus,
        t_plus=t_plus,
        t_minus=t_minus,
        tag=f"free_group_rank_{rank}",
    )


@dataclass(frozen=True)
class ParadoxReport:
    partition_ok: bool
    injective_ok: dict
    image_ok: dict
    displacement_ok: dict
    displacement: dict
    disjoint_images_ok: bool
    interior_defined_ok: dict
    interior_surjective_ok: dict
    witness: Optional[dict]

    @property
    def passed(self) -> bool:
        return (
            self.partition_ok
            and all(self.injective_ok.values())
            and all(self.image_ok.values())
            and all(self.displacement_ok.values())
            and self.disjoint_images_ok
            and all(self.interior_defined_ok.values())
            and all(self.interior_surjective_ok.values())
        )

    def to_json(self) -> dict:
        return {
            "partition_ok": self.partition_ok,
            "injective_ok": self.injective_ok,
            "image_ok": self.image_ok,
            "displacement_ok": self.displacement_ok,
            "displacement": self.displacement,
            "disjoint_images_ok": self.disjoint_images_ok,
            "interior_defined_ok": self.interior_defined_ok,
            "interior_surjective_ok": self.interior_surjective_ok,
            "witness": self.witness,
            "passed": self.passed,
        }


def verify_paradox(p: ParadoxicalDecomposition, w: Window) -> ParadoxReport:
    """Re-check a decomposition on a window and its displacement-interior."""
    space = p.space
    enc = space.point_to_json
    witness = None
    carrier = [x for x in w.points if p.in_carrier(x)]
    plus = {x for x in carrier if p.in_plus(x)}
    minus = {x for x in carrier if p.in_minus(x)}
    partition_ok = not (plus & minus) and (plus | minus) == set(carrier)
    if not partition_ok:
        overlap = plus & minus
        missed = set(carrier) - (plus | minus)
        witness = {
            "kind": "partition",
            "point": enc(next(iter(overlap or missed))),
        }

    injective_ok, image_ok, disp_ok, disp_val = {}, {}, {}, {}
    interior_defined_ok, interior_surjective_ok = {}, {}
    images = {}
    interior = set(w.interior(p.displacement))
    for name, t, part in (("plus", p.t_plus, plus), ("minus", p.t_minus, minus)):
        seen = {}
        inj = True
        img_ok = True
        dmax = 0
        defined_ok = True
        for x in carrier:
            y = t(x)
            if y is None:
                if x in interior:
                    defined_ok = False
                    if witness is None:
                        witness = {"kind": f"undefined_{name}", "point": enc(x)}
                continue
            y = space.normalize(y)
            if y in seen:
                inj = False
                if witness is None:
                    witness = {"kind": f"collision_{name}", "pair": [enc(seen[y]), enc(x)]}
            seen[y] = x
            in_part = p.in_plus(y) if name == "plus" else p.in_minus(y)
            if not in_part:
                img_ok = False
                if witness is None:
                    witness = {"kind": f"image_{name}", "pair": [enc(x), enc(y)]}
            d = space.dist(x, y)
            dmax = max(dmax, d)
        injective_ok[name] = inj
        image_ok[name] = img_ok
        disp_val[name] = dmax
        disp_ok[name] = dmax <= p.displacement
        if not disp_ok[name] and witness is None:
            witness = {"kind": f"displacement_{name}", "value": dmax}
        interior_defined_ok[name] = defined_ok
        images[name] = set(seen)
        surj = True
        for y in part & interior:
            if y not in seen:
                surj = False
                if witness is None:
                    witness = {"kind": f"not_covered_{name}", "point": enc(y)}
                break
        interior_surjective_ok[name] = surj

    disjoint = not (images["plus"] & images["minus"])
    if not disjoint and witness is None:
        witness = {
            "kind": "images_overlap",
            "point": enc(next(iter(images["plus"] & images["minus"]))),
        }
    return ParadoxReport(
        partition_ok,
        injective_ok,
        image_ok,
        disp_ok,
        disp_val,
        disjoint,
        interior_defined_ok,
        interior_surjective_ok,
        witness,
    )


def transport_paradox(
    p: ParadoxicalDecomposition,
    f: CoarseMap,
    declared_bound: Optional[int] = None,
) -> ParadoxicalDecomposition:
    """Push a decomposition forward along an injective uniformly expansive map.

    sigma_+/-(f(x)) = f(t_+/-(x)) for x in the source window; the result is a
    window-materialized decomposition on the image."""
    src = f.source
    carrier = [x for x in src.points if p.in_carrier(x)]
    values = {}
    for x in carrier:
        y = f(x)
        if y in values:
            raise NotInjective(
                f"map collapses {values[y]!r} and {x!r}", pair=(values[y], x)
            )
        values[y] = x

    dt = f.target_space
    plus_img, minus_img = [], []
    tp_pairs, tm_pairs = [], []
    disp = 0
    for x in carrier:
        fx = f(x)
        if p.in_plus(x):
            plus_img.append(fx)
        elif p.in_minus(x):
            minus_img.append(fx)
        for t, acc in ((p.t_plus, tp_pairs), (p.t_minus, tm_pairs)):
            y = t(x)
            if y is None or y not in src:
                continue
            d = dt.dist(fx, f(y))
            if declared_bound is not None and d > declared_bound:
                raise ExpansionUnbounded(
                    f"pair ({x!r}, {y!r}) expands to distance {d} > {declared_bound}",
                    pair=(x, y),
                )
            disp = max(disp, d)
            acc.append((fx, f(y)))
    return paradox_from_pairs(
        dt, disp, plus_img, minus_img, tp_pairs, tm_pairs,
        tag=f"transport({p.tag})",
    )


# ---------------------------------------------------------------------------
# Folner certificates
# ---------------------------------------------------------------------------

def neighborhood_points(space: Space, F, r: int) -> set:
    """The ambient r-neighborhood {x : d(x, F) <= r} as a point set."""
    out = set()
    for p in F:
        out.update(space.ball_points(p, r))
    return out


@dataclass(frozen=True)
class FolnerCertificate:
    space: Space
    F: tuple
    r: int
    eps: Fraction
    neighborhood_size: int

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.neighborhood_size, len(self.F))

    def to_json(self) -> dict:
        enc = self.space.point_to_json
        return {
            "F": [enc(p) for p in self.F],
            "r": self.r,
            "eps": str(self.eps),
            "neighborhood_size": self.neighborhood_size,
            "ratio": str(self.ratio),
        }


def verify_folner(cert: FolnerCertificate) -> dict:
    """Recompute |N_r(F)| from F alone and re-check the ratio bound."""
    n = len(neighborhood_points(cert.space, cert.F, cert.r))
    ok = (
        n == cert.neighborhood_size
        and Fraction(n, len(cert.F)) <= 1 + cert.eps
    )
    return {"recomputed": n, "declared": cert.neighborhood_size, "ok": ok}


@dataclass
class FolnerBudget:
    max_candidates: int = 10_000
    ball_radius_max: int = 64
    subsets_of_ball: Optional[int] = None  # exhaustive over subsets of this ball
    local_rounds: int = 0
    basepoint: Any = None

    @staticmethod
    def parse(text: str) -> "FolnerBudget":
        """Budget strings: 'balls:R', 'subsets-of-ball:R', 'local:R,ROUNDS'."""
        kind, _, arg = text.partition(":")
        if kind == "balls":
            return FolnerBudget(ball_radius_max=int(arg))
        if kind == "subsets-of-ball":
            return FolnerBudget(subsets_of_ball=int(arg))
        if kind == "local":
            radius, _, rounds = arg.partition(",")
            return FolnerBudget(ball_radius_max=int(radius), local_rounds=int(rounds or 8))
        raise MalformedSpec(f"unknown budget spec {text!r}")


@dataclass
class FolnerSearchReport:
    certificate: Optional[FolnerCertificate]
    best_ratio: Optional[Fraction]
    best_set: Optional[tuple]
    candidates_tested: int


def _ratio_of(space, F, r) -> Fraction:
    return Fraction(len(neighborhood_points(space, F, r)), len(F))


def folner_search_report(
    space: Space, r: int, eps, budget: Optional[FolnerBudget] = None
) -> FolnerSearchReport:
    if r < 1:
        raise MalformedSpec("scale must be >= 1")
    eps = Fraction(eps)
    if eps <= 0:
        raise MalformedSpec("eps must be > 0")
    budget = budget or FolnerBudget()
    base = space.normalize(budget.basepoint) if budget.basepoint is not None else space.origin()
    bound = 1 + eps

    if budget.subsets_of_ball is not None:
        return _folner_exhaustive(space, r, eps, base, budget.subsets_of_ball)

    tested = 0
    best: Optional[Fraction] = None
    best_set = None
    cert = None
    prev_pts = None
    for j in range(budget.ball_radius_max + 1):
        if tested >= budget.max_candidates:
            break
        F = tuple(space.ball_points(base, j))
        if prev_pts is not None and len(F) == len(prev_pts):
            break  # space exhausted around the basepoint
        prev_pts = F
        ratio = _ratio_of(space, F, r)
        tested += 1
        if best is None or ratio < best:
            best, best_set = ratio, F
        if ratio <= bound:
            cert = FolnerCertificate(
                space, F, r, eps, len(neighborhood_points(space, F, r))
            )
            break

    if cert is None and budget.local_rounds > 0 and best_set is not None:
        F = set(best_set)
        for _ in range(budget.local_rounds):
            if tested >= budget.max_candidates:
                break
            improved = False
            moves = [("drop", p) for p in sorted(F, key=space.canonical_key)]
            boundary = sorted(
                neighborhood_points(space, F, r) - F, key=space.canonical_key
            )
            moves += [("add", p) for p in boundary]
            for kind, p in moves:
                if tested >= budget.max_candidates:
                    break
                cand = F - {p} if kind == "drop" else F | {p}
                if not cand:
                    continue
                ratio = _ratio_of(space, tuple(cand), r)
                tested += 1
                if ratio < best:
                    best = ratio
                    F = cand
                    best_set = tuple(sorted(cand, key=space.canonical_key))
                    improved = True
                    break
            if not improved:
                break
        if best is not None and best <= bound:
            cert = FolnerCertificate(
                space,
                best_set,
                r,
                eps,
                len(neighborhood_points(space, best_set, r)),
            )
    return FolnerSearchReport(cert, best, best_set, tested)


def _folner_exhaustive(space, r, eps, base, ball_radius) -> FolnerSearchReport:
    ground = sorted(space.ball_points(base, ball_radius), key=space.canonical_key)
    m = len(ground)
    if m > 22:
        raise MalformedSpec(f"exhaustive budget over {m} points (2^{m} subsets) is too large")
    universe: dict = {}
    masks = []
    for p in ground:
        bits = 0
        for q in space.ball_points(p, r):
            idx = universe.setdefault(q, len(universe))
            bits |= 1 << idx
        masks.append(bits)
    # neighborhood mask of every subset, by peeling the lowest bit
    total = 1 << m
    nbr = [0] * total
    best_n, best_f, best_mask = None, None, None
    bound_num = (eps + 1).numerator
    bound_den = (eps + 1).denominator
    cert_mask = None
    for mask in range(1, total):
        low = (mask & -mask).bit_length() - 1
        nbr[mask] = nbr[mask ^ (mask & -mask)] | masks[low]
        nsize = nbr[mask].bit_count()
        fsize = mask.bit_count()
        if best_n is None or nsize * best_f < best_n * fsize:
            best_n, best_f, best_mask = nsize, fsize, mask
        if cert_mask is None and nsize * bound_den <= bound_num * fsize:
            cert_mask = mask
    best_set = tuple(ground[i] for i in range(m) if best_mask >> i & 1)
    cert = None
    if cert_mask is not None:
        F = tuple(ground[i] for i in range(m) if cert_mask >> i & 1)
        cert = FolnerCertificate(
            space, F, r, eps, len(neighborhood_points(space, F, r))
        )
    return FolnerSearchReport(cert, Fraction(best_n, best_f), best_set, total - 1)


def folner_search(space, r, eps, budget=None) -> Optional[FolnerCertificate]:
    return folner_search_report(space, r, eps, budget).certificate


def isoperimetric_profile(w: Window, r: int, mode: str = "greedy", size_cap: Optional[int] = None):
    """Per size, the minimal |N_r(F)| / |F| found over F inside the window
    (neighborhoods are ambient).  Returns a sorted list of (size, Fraction)."""
    space = w.space
    n = len(w.points)
    size_cap = size_cap if size_cap is not None else n
    best: dict[int, Fraction] = {}

    def record(F):
        k = len(F)
        if 1 <= k <= size_cap:
            ratio = _ratio_of(space, F, r)
            if k not in best or ratio < best[k]:
                best[k] = ratio

    if mode == "exhaustive":
        if n > 20:
            raise CapExceeded(f"exhaustive mode needs |w| <= 20, got {n}")
        universe: dict = {}
        masks = []
        for p in w.points:
            bits = 0
            for q in space.ball_points(p, r):
                idx = universe.setdefault(q, len(universe))
                bits |= 1 << idx
            masks.append(bits)
        nbr = [0] * (1 << n)
        for mask in range(1, 1 << n):
            low = (mask & -mask).bit_length() - 1
            nbr[mask] = nbr[mask ^ (mask & -mask)] | masks[low]
            k = mask.bit_count()
            if k <= size_cap:
                ratio = Fraction(nbr[mask].bit_count(), k)
                if k not in best or ratio < best[k]:
                    best[k] = ratio
    elif mode == "balls":
        for x in w.points:
            j = 0
            while True:
                F = tuple(q for q in w.points if space.dist(x, q) <= j)
                record(F)
                if len(F) == n:
                    break
                j += 1
    elif mode == "greedy":
        F: list = [w.points[0]]
        record(tuple(F))
        remaining = [p for p in w.points[1:]]
        while remaining and len(F) < size_cap:
            scored = [
                (len(neighborhood_points(space, F + [q], r)), space.canonical_key(q), q)
                for q in remaining
            ]
            _, _, q = min(scored)
            F.append(q)
            remaining.remove(q)
            record(tuple(F))
    else:
        raise MalformedSpec(f"unknown mode {mode!r}")
    return sorted(best.items())


# ---------------------------------------------------------------------------
# doubling matchings on windows (max-flow route)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WindowedDoubling:
    window: Window
    r: int
    interior: tuple
    u_plus: dict
    u_minus: dict

    def to_json(self) -> dict:
        enc = self.window.space.point_to_json
        return {
            "r": self.r,
            "interior": [enc(p) for p in self.interior],
            "u_plus": [[enc(a), enc(b)] for a, b in sorted(
                self.u_plus.items(), key=lambda ab: self.window.space.canonical_key(ab[0])
            )],
            "u_minus": [[enc(a), enc(b)] for a, b in sorted(
                self.u_minus.items(), key=lambda ab: self.window.space.canonical_key(ab[0])
            )],
        }


def verify_doubling(d: WindowedDoubling) -> dict:
    """Recheck injectivity, image disjointness, displacement, and domains."""
    w = d.window
    space = w.space
    interior = set(d.interior)
    report = {
        "domains_ok": set(d.u_plus) == interior and set(d.u_minus) == interior,
        "injective_ok": len(set(d.u_plus.values())) == len(d.u_plus)
        and len(set(d.u_minus.values())) == len(d.u_minus),
        "disjoint_ok": not (set(d.u_plus.values()) & set(d.u_minus.values())),
        "displacement_ok": all(
            space.dist(a, b) <= d.r
            for m in (d.u_plus, d.u_minus)
            for a, b in m.items()
        ),
        "range_ok": all(
            b in w for m in (d.u_plus, d.u_minus) for b in m.values()
        ),
        "interior_ok": set(d.interior) == set(w.interior(d.r)),
    }
    report["ok"] = all(report.values())
    return report


@dataclass
class MatchingOutcome:
    feasible: bool
    doubling: Optional[WindowedDoubling]
    cut: Optional[tuple]
    cut_neighborhood_size: Optional[int]
    flow_value: int


def matching_certificate(w: Window, r: int) -> MatchingOutcome:
    """2-to-1 doubling matching from Interior_r(w) into w via max flow.

    Feasible: returns the split assignment (ties broken by canonical order).
    Infeasible: returns a Hall violator F subseteq Interior with
    |N_r(F) ∩ w| < 2 |F|."""
    if r < 1:
        raise MalformedSpec("scale must be >= 1")
    interior = w.interior(r)
    n_int = len(interior)
    if n_int == 0:
        return MatchingOutcome(True, WindowedDoubling(w, r, (), {}, {}), None, None, 0)

    # adjacency: window points within r of each interior point (self included)
    ii, jj = scale_pairs(w, r)
    adj: dict[int, set] = {w.index(p): {w.index(p)} for p in interior}
    int_idx = set(adj)
    for a, b in zip(ii, jj):
        a, b = int(a), int(b)
        if a in int_idx:
            adj[a].add(b)
        if b in int_idx:
            adj[b].add(a)

    interior_order = [w.index(p) for p in interior]
    target_ids = sorted({t for s in adj.values() for t in s})
    t_pos = {t: k for k, t in enumerate(target_ids)}
    n_tgt = len(target_ids)
    source = 0
    int_node = {idx: 1 + k for k, idx in enumerate(interior_order)}
    tgt_node = {t: 1 + n_int + t_pos[t] for t in target_ids}
    sink = 1 + n_int + n_tgt
    big = 2 * n_int + 1

    rows, cols, caps = [], [], []
    for idx in interior_order:
        rows.append(source)
        cols.append(int_node[idx])
        caps.append(2)
        for t in sorted(adj[idx]):
            rows.append(int_node[idx])
            cols.append(tgt_node[t])
            caps.append(big)
    for t in target_ids:
        rows.append(tgt_node[t])
        cols.append(sink)
        caps.append(1)
    graph = sparse.csr_matrix(
        (np.array(caps, dtype=np.int32), (rows, cols)), shape=(sink + 1, sink + 1)
    )
    res = maximum_flow(graph, source, sink)
    flow = res.flow

    if res.flow_value == 2 * n_int:
        u_plus, u_minus = {}, {}
        for idx in interior_order:
            node = int_node[idx]
            row = flow.getrow(node).tocoo()
            picks = sorted(
                target_ids[c - 1 - n_int]
                for c, v in zip(row.col, row.data)
                if v > 0 and c != source
            )
            a, b = picks[0], picks[1]
            u_plus[w.points[idx]] = w.points[a]
            u_minus[w.points[idx]] = w.points[b]
        doubling = WindowedDoubling(w, r, tuple(interior), u_plus, u_minus)
        return MatchingOutcome(True, doubling, None, None, int(res.flow_value))

    # residual BFS from the source to extract a Hall violator
    cap_lookup = {}
    for u, v, c in zip(rows, cols, caps):
        cap_lookup[(u, v)] = cap_lookup.get((u, v), 0) + c
    fwd: dict[int, list[int]] = {}
    for u, v in cap_lookup:
        fwd.setdefault(u, []).append(v)
    reach = {source}
    stack = [source]
    flow_csr = flow.tocsr()
    while stack:
        u = stack.pop()
        for v in fwd.get(u, ()):  # forward residual
            if v not in reach and cap_lookup[(u, v)] - flow_csr[u, v] > 0:
                reach.add(v)
                stack.append(v)
        row = flow_csr.getrow(u).tocoo()
        for v, val in zip(row.col, row.data):  # backward residual
            if val < 0 and int(v) not in reach and (int(v), u) in cap_lookup:
                reach.add(int(v))
                stack.append(int(v))
    F_idx = [idx for idx in interior_order if int_node[idx] in reach]
    F = tuple(w.points[idx] for idx in F_idx)
    nbrs = set()
    for idx in F_idx:
        nbrs.update(adj[idx])
    if len(nbrs) >= 2 * len(F):
        raise AssertionError("min-cut extraction produced a non-violating set")
    return MatchingOutcome(False, None, F, len(nbrs), int(res.flow_value))


# ---------------------------------------------------------------------------
# growth
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GrowthProfile:
    sizes: tuple  # |B_n(x)| for n = 0..n_max
    tag: str      # polynomial-like | exponential-like | inconclusive
    tail_slope: float

    def to_json(self) -> dict:
        return {"sizes": list(self.sizes), "tag": self.tag, "tail_slope": self.tail_slope}


def _ball_size_sweep(space: Space, x, n_max: int, cap: int) -> list[int]:
    from .spaces import FreeGroupSpace, GridSpace, ProductFiniteSpace

    closed_form = isinstance(space, (GridSpace, FreeGroupSpace)) or (
        isinstance(space, ProductFiniteSpace)
        and isinstance(space.base, (GridSpace, FreeGroupSpace))
    )
    if space.finite or closed_form:
        sizes = [space.ball_size(x, n) for n in range(n_max + 1)]
        if any(s > cap for s in sizes):
            raise EnumerationOverflow(f"ball size exceeds cap {cap}")
        return sizes
    if not space.graph_like:
        raise MalformedSpec(f"cannot sweep ball sizes on {space.kind}")
    # incremental BFS with a hard abort, for infinite trees and the like
    seen = {x}
    frontier = [x]
    sizes = [1]
    for _ in range(n_max):
        nxt = []
        for p in frontier:
            for q in space.neighbors(p):
                if q not in seen:
                    seen.add(q)
                    nxt.append(q)
                    if len(seen) > cap:
                        raise EnumerationOverflow(f"ball size exceeds cap {cap}")
        frontier = nxt
        sizes.append(len(seen))
    return sizes


def growth_profile(space: Space, x, n_max: int, cap: int = 2_000_000) -> GrowthProfile:
    """Ball sizes with an advisory growth tag from a log-scale regression on
    the upper half of the computed range (slope > 0.2 per step reads as
    exponential-like)."""
    if n_max < 1:
        raise MalformedSpec("n_max must be >= 1")
    x = space.normalize(x)
    sizes = _ball_size_sweep(space, x, n_max, cap)
    if n_max < 3:
        return GrowthProfile(tuple(sizes), "inconclusive", 0.0)
    lo = n_max // 2
    ns = np.arange(lo, n_max + 1, dtype=float)
    ys = np.log([sizes[int(n)] for n in ns])
    slope = float(np.polyfit(ns, ys, 1)[0]) if len(ns) >= 2 else 0.0
    tag = "exponential-like" if slope > 0.2 else "polynomial-like"
    return GrowthProfile(tuple(sizes), tag, slope)
