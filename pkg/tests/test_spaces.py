import pytest

import coarsekit as ck
from coarsekit.errors import (
    EnumerationOverflow,
    MalformedSpec,
    MetricViolation,
    UnknownPoint,
)


def test_grid_line_distance():
    Z = ck.make_space({"kind": "grid", "dim": 1})
    assert ck.dist(Z, (3,), (-4,)) == 7
    assert ck.dist(Z, 3, -4) == 7  # bare ints accepted in dim 1


def test_grid2_l1():
    g2 = ck.make_space({"kind": "grid", "dim": 2})
    assert ck.dist(g2, (0, 0), (3, -2)) == 5


def test_free_group_reduced_word_distance():
    F2 = ck.make_space({"kind": "free_group", "rank": 2})
    assert ck.dist(F2, "ab", "ba") == 4
    assert ck.dist(F2, "", "abA") == 3
    assert ck.dist(F2, "ab", "ab") == 0


def test_free_group_rejects_unreduced_word():
    F2 = ck.make_space({"kind": "free_group", "rank": 2})
    with pytest.raises(UnknownPoint):
        F2.normalize("aA")
    with pytest.raises(UnknownPoint):
        F2.normalize("xc")


def test_product_sum_metric():
    prod = ck.make_space(
        {"kind": "product_finite", "base": {"kind": "grid", "dim": 1}, "n": 3}
    )
    assert ck.dist(prod, ((0,), 1), ((2,), 3)) == 3
    assert ck.dist(prod, ((0,), 2), ((0,), 2)) == 0
    assert ck.dist(prod, ((0,), 1), ((0,), 3)) == 1


def test_ball_sizes():
    Z = ck.make_space({"kind": "grid", "dim": 1})
    assert len(ck.ball(Z, (0,), 5).points) == 11
    g2 = ck.make_space({"kind": "grid", "dim": 2})
    assert len(ck.ball(g2, (0, 0), 2).points) == 13
    F2 = ck.make_space({"kind": "free_group", "rank": 2})
    assert len(ck.ball(F2, "", 3).points) == 53


def test_free_group_ball_recurrence():
    # |B_n| = 2k(2k-1)^(n-1) + |B_(n-1)|, cross-checked against BFS enumeration
    for k in (2, 3):
        F = ck.make_space({"kind": "free_group", "rank": k})
        prev = 1
        for n in range(1, 6):
            enum = len(ck.ball(F, "", n).points)
            assert enum == 2 * k * (2 * k - 1) ** (n - 1) + prev
            assert enum == F.ball_size("", n)
            prev = enum


def test_ball_nested_and_monotone():
    F2 = ck.make_space({"kind": "free_group", "rank": 2})
    prev = set()
    for r in range(5):
        cur = set(ck.ball(F2, "ab", r).points)
        assert prev <= cur
        prev = cur


def test_ball_cap_overflow():
    F2 = ck.make_space({"kind": "free_group", "rank": 2})
    with pytest.raises(EnumerationOverflow):
        ck.ball(F2, "", 5, cap=100)


def test_bounded_geometry_profile():
    Z = ck.make_space({"kind": "grid", "dim": 1})
    w = ck.Window(Z, [(x,) for x in range(-10, 11)])
    assert ck.bounded_geometry_profile(w, 1) == 3
    F2 = ck.make_space({"kind": "free_group", "rank": 2})
    assert ck.bounded_geometry_profile(ck.ball(F2, "", 4), 1) == 5
    single = ck.Window(Z, [(7,)])
    assert ck.bounded_geometry_profile(single, 99) == 1


def test_custom_space_triangle_violation():
    with pytest.raises(MetricViolation) as exc:
        ck.make_space(
            {
                "kind": "custom",
                "points": ["a", "b", "c"],
                "dist": [[0, 1, 5], [1, 0, 1], [5, 1, 0]],
            }
        )
    assert exc.value.witness == ("a", "b", "c")


def test_custom_space_symmetry_and_zero_diag():
    with pytest.raises(MetricViolation):
        ck.make_space(
            {"kind": "custom", "points": [0, 1], "dist": [[0, 1], [2, 0]]}
        )
    with pytest.raises(MetricViolation):
        ck.make_space(
            {"kind": "custom", "points": [0, 1], "dist": [[0, 0], [0, 0]]}
        )


def test_disjoint_union_gap_divergence():
    # singleton blocks, gaps 10k: distance from block k to the rest is
    # min(gaps[k-1], gaps[k]) and diverges
    blocks = [{"kind": "point_line", "coords": [0]} for _ in range(6)]
    gaps = [10 * (k + 1) for k in range(5)]
    du = ck.make_space({"kind": "disjoint_union", "blocks": blocks, "gaps": gaps})
    seps = []
    for k in range(6):
        others = [l for l in range(6) if l != k]
        seps.append(min(du.block_distance(k, l) for l in others))
    assert seps[1] == 10 and seps[3] == 30
    assert all(a <= b for a, b in zip(seps[1:], seps[2:]))


def test_disjoint_union_cross_distance_includes_diameters():
    blocks = [
        {"kind": "point_line", "coords": [0, 1, 2]},
        {"kind": "point_line", "coords": [0, 5]},
    ]
    du = ck.make_space({"kind": "disjoint_union", "blocks": blocks, "gaps": [7]})
    # diam 2 + diam 5 + gap 7
    assert ck.dist(du, (0, 0), (1, 5)) == 14
    assert ck.dist(du, (0, 2), (0, 0)) == 2


def test_disjoint_union_needs_matching_gaps():
    with pytest.raises(MalformedSpec):
        ck.make_space(
            {
                "kind": "disjoint_union",
                "blocks": [{"kind": "point_line", "coords": [0]}] * 3,
                "gaps": [1],
            }
        )


def test_metric_axioms_on_windows():
    # exhaustive check on every bundled kind with a small window
    specs = [
        {"kind": "grid", "dim": 2},
        {"kind": "free_group", "rank": 2},
        {"kind": "tree", "branching": 3},
        {"kind": "point_line", "coords": [1, 2, 4, 8, 16]},
        {
            "kind": "disjoint_union",
            "blocks": [{"kind": "point_line", "coords": [0, 1]}] * 3,
            "gaps": [3, 9],
        },
        {"kind": "product_finite", "base": {"kind": "free_group", "rank": 2}, "n": 2},
    ]
    for spec in specs:
        s = ck.make_space(spec)
        if s.finite:
            w = ck.Window(s, s.all_points())
        else:
            w = ck.ball(s, s.origin(), 2)
        assert ck.verify_metric(w)["ok"], spec


def test_tree_branching_distances():
    t = ck.make_space({"kind": "tree", "branching": 2})
    # children of 0 are 1, 2; children of 1 are 3, 4
    assert ck.dist(t, 0, 3) == 2
    assert ck.dist(t, 3, 4) == 2
    assert ck.dist(t, 3, 2) == 3
    assert len(ck.ball(t, 0, 2).points) == 7


def test_tree_edges_finite():
    t = ck.make_space({"kind": "tree", "edges": [[0, 1], [1, 2], [1, 3]]})
    assert ck.dist(t, 0, 2) == 2
    assert ck.dist(t, 2, 3) == 2
    with pytest.raises(MalformedSpec):
        ck.make_space({"kind": "tree", "edges": [[0, 1], [2, 3]]})


def test_window_interior():
    Z = ck.make_space({"kind": "grid", "dim": 1})
    w = ck.ball(Z, (0,), 10)
    assert set(w.interior(3)) == {(x,) for x in range(-7, 8)}
    assert w.interior(0) == w.points
    assert w.interior(11) == ()
    # Interior_r shrinks as r grows
    for r in range(5):
        assert set(w.interior(r + 1)) <= set(w.interior(r))


def test_window_interior_generic_kind():
    pl = ck.make_space({"kind": "point_line", "coords": [0, 1, 2, 10, 11]})
    w = ck.Window(pl, [0, 1, 2, 10])
    # ambient B_1(10) = {10, 11} sticks out of the window; the rest stay in
    assert set(w.interior(1)) == {0, 1, 2}


def test_window_canonical_order_and_dedupe():
    Z = ck.make_space({"kind": "grid", "dim": 1})
    w = ck.Window(Z, [(5,), (1,), (5,), (-2,)])
    assert w.points == ((-2,), (1,), (5,))


def test_space_json_round_trip():
    specs = [
        {"kind": "grid", "dim": 3},
        {"kind": "free_group", "rank": 2},
        {"kind": "point_line", "coords": [1, 2, 4]},
        {"kind": "product_finite", "base": {"kind": "grid", "dim": 1}, "n": 2},
    ]
    for spec in specs:
        assert ck.make_space(spec).to_spec() == spec


def _pairs_as_set(w, r):
    ii, jj = ck.scale_pairs(w, r)
    return {(int(a), int(b)) for a, b in zip(ii, jj)}


def test_scale_pairs_grid_matches_bruteforce():
    g2 = ck.make_space({"kind": "grid", "dim": 2})
    import numpy as np

    rng = np.random.RandomState(9)
    pts = {(int(rng.randint(-8, 9)), int(rng.randint(-8, 9))) for _ in range(60)}
    w = ck.Window(g2, pts)
    n = len(w.points)
    for r in (1, 2, 4, 7):
        brute = {
            (i, j)
            for i in range(n)
            for j in range(i + 1, n)
            if g2.dist(w.points[i], w.points[j]) <= r
        }
        assert _pairs_as_set(w, r) == brute


def test_scale_pairs_tree_ball_matches_bruteforce():
    F2 = ck.make_space({"kind": "free_group", "rank": 2})
    w = ck.ball(F2, "a", 4)
    n = len(w.points)
    for r in (1, 2, 3):
        brute = {
            (i, j)
            for i in range(n)
            for j in range(i + 1, n)
            if F2.dist(w.points[i], w.points[j]) <= r
        }
        assert _pairs_as_set(w, r) == brute


def test_scale_pairs_disjoint_union_matches_bruteforce():
    import numpy as np
    from scipy.sparse.csgraph import shortest_path

    rng = np.random.RandomState(42)
    blocks = []
    for _ in range(4):
        n = int(rng.randint(2, 6))
        coords = rng.randint(0, 10, size=n)
        D = np.abs(coords[:, None] - coords[None, :])
        D = D + (D == 0) * (1 - np.eye(n, dtype=int))
        D = shortest_path(D, directed=False).astype(int)
        blocks.append(
            {"kind": "custom", "points": [f"p{i}" for i in range(n)], "dist": D.tolist()}
        )
    du = ck.make_space({"kind": "disjoint_union", "blocks": blocks, "gaps": [2, 5, 9]})
    w = ck.Window(du, du.all_points())
    n = len(w.points)
    for r in (1, 2, 3, 6, 11, 20):
        brute = {
            (i, j)
            for i in range(n)
            for j in range(i + 1, n)
            if du.dist(w.points[i], w.points[j]) <= r
        }
        assert _pairs_as_set(w, r) == brute


def test_scale_pairs_product_matches_bruteforce():
    F2 = ck.make_space({"kind": "free_group", "rank": 2})
    prod = ck.make_space(
        {"kind": "product_finite", "base": {"kind": "free_group", "rank": 2}, "n": 3}
    )
    base_pts = ck.ball(F2, "", 2).points
    w = ck.Window(prod, [(x, l) for x in base_pts for l in (1, 2, 3)])
    n = len(w.points)
    for r in (1, 2, 3):
        brute = {
            (i, j)
            for i in range(n)
            for j in range(i + 1, n)
            if prod.dist(w.points[i], w.points[j]) <= r
        }
        assert _pairs_as_set(w, r) == brute


def test_interior_fast_path_matches_generic():
    F2 = ck.make_space({"kind": "free_group", "rank": 2})
    b = ck.ball(F2, "ab", 4)
    unflagged = ck.Window(F2, b.points)  # same points, generic interior path
    for r in (1, 2, 3):
        assert set(b.interior(r)) == set(unflagged.interior(r))


def test_make_space_rejects_bad_specs():
    for bad in (
        {"kind": "grid", "dim": 0},
        {"kind": "free_group", "rank": 0},
        {"kind": "nope"},
        {"kind": "point_line", "coords": [3, 1]},
        42,
    ):
        with pytest.raises(MalformedSpec):
            ck.make_space(bad)
