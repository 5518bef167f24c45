import numpy as np
import pytest

import coarsekit as ck
from coarsekit.errors import DomainMismatch, Infeasible, MalformedSpec

Z = ck.make_space({"kind": "grid", "dim": 1})
Z2 = ck.make_space({"kind": "grid", "dim": 2})


def line_window(lo, hi):
    return ck.Window(Z, [(x,) for x in range(lo, hi + 1)])


def test_envelopes_isometric_inclusion():
    w = line_window(-15, 15)
    f = ck.CoarseMap(w, Z2, lambda p: (p[0], 0))
    env = ck.expansion_envelopes(f)
    for t in range(env.t_max + 1):
        assert env.rho_plus[t] == t
        assert env.rho_minus[t] == t


def test_envelopes_constant_map():
    w = line_window(0, 10)
    f = ck.CoarseMap(w, Z, lambda p: (0,))
    env = ck.expansion_envelopes(f)
    assert set(env.rho_plus) == {0} and set(env.rho_minus) == {0}


def test_envelopes_doubling():
    w = line_window(-10, 10)
    f = ck.CoarseMap(w, Z, lambda p: (2 * p[0],))
    env = ck.expansion_envelopes(f)
    for t in range(1, env.t_max + 1):
        assert env.rho_plus[t] == 2 * t and env.rho_minus[t] == 2 * t


def test_envelope_sandwich_random_maps():
    rng = np.random.RandomState(4)
    w = line_window(0, 25)
    for _ in range(10):
        targets = {p: (int(rng.randint(-20, 20)), int(rng.randint(-20, 20))) for p in w.points}
        f = ck.CoarseMap(w, Z2, targets)
        env = ck.expansion_envelopes(f)
        for i, p in enumerate(w.points):
            for q in w.points[i + 1:]:
                d = Z.dist(p, q)
                fd = Z2.dist(f(p), f(q))
                assert env.rho_minus[d] <= fd <= env.rho_plus[d]
        assert all(a <= b for a, b in zip(env.rho_plus, env.rho_plus[1:]))
        assert all(a <= b for a, b in zip(env.rho_minus, env.rho_minus[1:]))


def test_classify_axis_inclusion():
    w = line_window(-50, 50)
    f = ck.CoarseMap(w, Z2, lambda p: (p[0], 0))
    tw = ck.ball(Z2, (0, 0), 50)
    cls = ck.classify(f, target_window=tw)
    assert cls.uniformly_expansive and cls.embedding_evidence
    # points (0, y) sit |y| away from the axis: equivalence fails below 50
    assert cls.equivalence_c == 50
    for c in (1, 10, 49):
        assert not ck.classify(f, target_window=tw, c=c).equivalence


def test_classify_projection_no_evidence():
    w = ck.ball(Z2, (0, 0), 10)
    f = ck.CoarseMap(w, Z, lambda p: (p[0],))
    cls = ck.classify(f)
    assert cls.uniformly_expansive
    assert not cls.embedding_evidence
    assert cls.envelopes.rho_minus[cls.envelopes.t_max] == 0


def test_classify_doubling_equivalence():
    w = line_window(-20, 20)
    f = ck.CoarseMap(w, Z, lambda p: (2 * p[0],))
    tw = line_window(-40, 40)
    cls = ck.classify(f, target_window=tw, c=1)
    assert cls.equivalence and cls.equivalence_c == 1
    assert cls.bi_lipschitz and cls.lipschitz_constant == pytest.approx(2.0)


def test_injectivity_net_injective_map_keeps_all():
    w = line_window(0, 10)
    f = ck.CoarseMap(w, Z, lambda p: (3 * p[0],))
    assert ck.injectivity_net(f, 0).points == w.points


def test_injectivity_net_halving():
    w = line_window(0, 20)
    f = ck.CoarseMap(w, Z, lambda p: (p[0] // 2,))
    Y = ck.injectivity_net(f, 1)
    assert [p[0] for p in Y.points] == [x for x in range(0, 21, 2)]
    vals = [f(p) for p in Y.points]
    assert len(set(vals)) == len(vals)


def test_injectivity_net_constant_infeasible():
    w = line_window(0, 10)
    f = ck.CoarseMap(w, Z, lambda p: (0,))
    with pytest.raises(Infeasible) as exc:
        ck.injectivity_net(f, 3)
    assert exc.value.witness is not None


def test_net_extract():
    w = line_window(0, 12)
    assert ck.net_extract(w, 0).points == w.points
    y = ck.net_extract(w, 2)
    assert [p[0] for p in y.points] == [0, 3, 6, 9, 12]
    single = ck.Window(Z, [(7,)])
    assert ck.net_extract(single, 5).points == ((7,),)


def test_net_extract_is_separated_and_dense():
    F2 = ck.make_space({"kind": "free_group", "rank": 2})
    w = ck.ball(F2, "", 4)
    for c in (1, 2, 3):
        y = ck.net_extract(w, c)
        pts = y.points
        for i, p in enumerate(pts):
            for q in pts[i + 1:]:
                assert F2.dist(p, q) > c
        for p in w.points:
            assert min(F2.dist(p, q) for q in pts) <= c


def test_compose():
    w = line_window(-5, 5)
    wide = line_window(-20, 20)
    f = ck.CoarseMap(w, Z, lambda p: (p[0] + 1,))
    g = ck.CoarseMap(wide, Z, lambda p: (2 * p[0],))
    gf = ck.compose(f, g)
    assert all(gf(p) == (2 * p[0] + 2,) for p in w.points)
    ident = ck.CoarseMap(wide, Z, lambda p: p)
    assert all(ck.compose(f, ident)(p) == f(p) for p in w.points)


def test_compose_envelope_bound():
    w = line_window(-5, 5)
    wide = line_window(-30, 30)
    f = ck.CoarseMap(w, Z, lambda p: (2 * p[0],))
    g = ck.CoarseMap(wide, Z, lambda p: (2 * p[0],))
    gf = ck.compose(f, g)
    env = ck.expansion_envelopes(gf)
    env_f = ck.expansion_envelopes(f)
    env_g = ck.expansion_envelopes(g)
    for t in range(env.t_max + 1):
        assert env.rho_plus[t] <= env_g.rho_plus[min(env_f.rho_plus[t], env_g.t_max)]
        assert env.rho_plus[t] == 4 * t


def test_compose_domain_mismatch():
    w = line_window(0, 5)
    small = line_window(0, 3)
    f = ck.CoarseMap(w, Z, lambda p: (p[0] + 10,))
    g = ck.CoarseMap(small, Z, lambda p: p)
    with pytest.raises(DomainMismatch):
        ck.compose(f, g)


def test_transport_preconditions_match_classify():
    # transport succeeds exactly when the map is injective on the carrier
    # (windows are always uniformly expansive)
    F2 = ck.make_space({"kind": "free_group", "rank": 2})
    p = ck.paradox_free_group(2)
    src = ck.ball(F2, "", 2)

    good = ck.CoarseMap(src, Z2, {x: (3 * i, i) for i, x in enumerate(src.points)})
    cls = ck.classify(good)
    assert cls.uniformly_expansive and cls.injective
    ck.transport_paradox(p, good)  # does not raise

    bad = ck.CoarseMap(src, Z2, {x: (min(i, 1), 0) for i, x in enumerate(src.points)})
    assert not ck.classify(bad).injective
    with pytest.raises(ck.errors.NotInjective):
        ck.transport_paradox(p, bad)


def test_map_requires_totality():
    w = line_window(0, 3)
    with pytest.raises(MalformedSpec):
        ck.CoarseMap(w, Z, {(0,): (0,)})
