"""Maps between spaces at window scale: expansion envelopes, classification,
injectivity nets, and c-nets."""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil
from typing import Optional

from .errors import DomainMismatch, Infeasible, MalformedSpec, UnknownPoint
from .spaces import Space, Window


class CoarseMap:
    """A map from a source window into a target space, stored as an explicit pairing."""

    def __init__(self, source: Window, target_space: Space, mapping, declared: Optional[str] = None):
        self.source = source
        self.target_space = target_space
        if callable(mapping):
            pairs = {p: target_space.normalize(mapping(p)) for p in source.points}
        else:
            pairs = {
                source.space.normalize(k): target_space.normalize(v)
                for k, v in (mapping.items() if isinstance(mapping, dict) else mapping)
            }
        for p in source.points:
            if p not in pairs:
                raise MalformedSpec(f"map is not total on the source window: missing {p!r}")
        self.mapping = {p: pairs[p] for p in source.points}
        self.declared = declared

    def __call__(self, p):
        try:
            return self.mapping[p]
        except KeyError:
            raise UnknownPoint(f"{p!r} is outside the source window") from None

    def image(self) -> list:
        return [self.mapping[p] for p in self.source.points]

    def to_json(self) -> dict:
        enc_s = self.source.space.point_to_json
        enc_t = self.target_space.point_to_json
        return {
            "pairs": [[enc_s(p), enc_t(q)] for p, q in self.mapping.items()]
        }


@dataclass(frozen=True)
class ExpansionEnvelopes:
    """Sampled envelopes over all window pairs:
    rho_plus[t]  = max d(fx, fy) over pairs with d(x, y) <= t,
    rho_minus[t] = min d(fx, fy) over pairs with d(x, y) >= t,
    for integer t in 0..diameter."""

    rho_plus: tuple
    rho_minus: tuple

    @property
    def t_max(self) -> int:
        return len(self.rho_plus) - 1

    def to_json(self) -> dict:
        return {"rho_plus": list(self.rho_plus), "rho_minus": list(self.rho_minus)}


def expansion_envelopes(f: CoarseMap) -> ExpansionEnvelopes:
    pts = f.source.points
    if not pts:
        raise MalformedSpec("source window is empty")
    ds = f.source.space
    dt = f.target_space
    diam = 0
    pair_data = []
    for i, p in enumerate(pts):
        for q in pts[i + 1:]:
            d = ds.dist(p, q)
            pair_data.append((d, dt.dist(f(p), f(q))))
            if d > diam:
                diam = d
    max_at = [0] * (diam + 1)   # max image distance among pairs at exactly t
    min_at = [None] * (diam + 1)
    for d, fd in pair_data:
        if fd > max_at[d]:
            max_at[d] = fd
        if min_at[d] is None or fd < min_at[d]:
            min_at[d] = fd
    rho_plus = []
    run = 0
    for t in range(diam + 1):
        run = max(run, max_at[t])
        rho_plus.append(run)
    rho_minus = [None] * (diam + 1)
    run = None
    for t in range(diam, -1, -1):
        if min_at[t] is not None:
            run = min_at[t] if run is None else min(run, min_at[t])
        rho_minus[t] = run if run is not None else 0
    rho_minus[0] = 0  # the diagonal pairs
    return ExpansionEnvelopes(tuple(rho_plus), tuple(rho_minus))


@dataclass(frozen=True)
class MapClassification:
    uniformly_expansive: bool
    envelopes: ExpansionEnvelopes
    injective: bool
    embedding_evidence: bool
    embedding_threshold: int
    equivalence: Optional[bool]
    equivalence_c: Optional[int]
    bi_lipschitz: bool
    lipschitz_constant: Optional[float]

    def to_json(self) -> dict:
        return {
            "uniformly_expansive": self.uniformly_expansive,
            "envelopes": self.envelopes.to_json(),
            "injective": self.injective,
            "embedding_evidence": self.embedding_evidence,
            "embedding_threshold": self.embedding_threshold,
            "equivalence": self.equivalence,
            "equivalence_c": self.equivalence_c,
            "bi_lipschitz": self.bi_lipschitz,
            "lipschitz_constant": self.lipschitz_constant,
        }


def classify(
    f: CoarseMap,
    target_window: Optional[Window] = None,
    c: Optional[int] = None,
    embedding_threshold: Optional[int] = None,
) -> MapClassification:
    """Window-scale flags.  Embedding evidence means the lower envelope grows
    past a threshold across the sampled range; it is never a proof."""
    env = expansion_envelopes(f)
    t_max = env.t_max
    if embedding_threshold is None:
        embedding_threshold = max(1, ceil(t_max / 2))
    evidence = t_max >= 1 and env.rho_minus[t_max] >= embedding_threshold

    injective = len(set(f.mapping.values())) == len(f.mapping)

    equivalence = None
    eq_c = None
    if target_window is not None:
        image = f.image()
        worst = 0
        for y in target_window.points:
            d = min(f.target_space.dist(y, z) for z in image)
            if d > worst:
                worst = d
        eq_c = worst if c is None else c
        equivalence = evidence and worst <= eq_c

    bi = injective and t_max >= 1 and all(env.rho_minus[t] >= 1 for t in range(1, t_max + 1))
    L = None
    if bi:
        L = 1.0
        for t in range(1, t_max + 1):
            L = max(L, env.rho_plus[t] / t, t / env.rho_minus[t])
    return MapClassification(
        uniformly_expansive=True,
        envelopes=env,
        injective=injective,
        embedding_evidence=evidence,
        embedding_threshold=embedding_threshold,
        equivalence=equivalence,
        equivalence_c=eq_c,
        bi_lipschitz=bi,
        lipschitz_constant=L,
    )


def injectivity_net(f: CoarseMap, c: int) -> Window:
    """Greedy sub-window Y on which f is injective and which is c-dense in the
    source; raises Infeasible (with a witness point) when the greedy pass
    cannot cover some point without reusing an f-value."""
    if c < 0:
        raise MalformedSpec("c must be >= 0")
    src = f.source
    ds = src.space
    chosen: list = []
    used_values = set()
    for p in src.points:
        if any(ds.dist(p, y) <= c for y in chosen):
            continue
        placed = False
        # prefer p itself, then the canonically first usable point within c
        candidates = [p] + [q for q in src.points if q != p and ds.dist(p, q) <= c]
        for q in candidates:
            if f(q) not in used_values:
                chosen.append(q)
                used_values.add(f(q))
                placed = True
                break
        if not placed:
            raise Infeasible(
                f"every point within {c} of {p!r} maps to an already-used value",
                witness=p,
            )
    return src.subwindow(chosen)


def net_extract(w: Window, c: int) -> Window:
    """Greedy maximal c-separated subset; maximality makes it c-dense."""
    if c < 0:
        raise MalformedSpec("c must be >= 0")
    ds = w.space
    chosen: list = []
    for p in w.points:
        if all(ds.dist(p, y) > c for y in chosen):
            chosen.append(p)
    return w.subwindow(chosen)


def compose(f: CoarseMap, g: CoarseMap) -> CoarseMap:
    """g after f; every f-image point must lie in g's source window."""
    for p in f.source.points:
        if f(p) not in g.source:
            raise DomainMismatch(
                f"f({p!r}) = {f(p)!r} is outside the source window of g"
            )
    return CoarseMap(
        f.source, g.target_space, {p: g(f(p)) for p in f.source.points}
    )
