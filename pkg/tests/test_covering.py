import dataclasses

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from meshkit.covering import (
    ball_isomorphic,
    ball_morphism,
    build_covering_ball,
    check_covering,
    collapse_ball,
    lift_path,
    replay_witness,
    walks_homotopic,
)
from meshkit.errors import OutOfWindowError, PreconditionError, QuiverError
from meshkit.generators import TreeSpec, gen_kronecker, gen_triangle_An, gen_tube, gen_ztree
from meshkit.quiver import TranslationQuiver, Vertex, Walk, collapse, paths_from, validate
from conftest import load_cover

KRON = gen_kronecker(4)


def fwd(*arrows):
    return tuple((a, 1) for a in arrows)


def test_backtrack_is_trivial():
    w = Walk("v1", (("a0", -1), ("a0", 1)))
    res = walks_homotopic(KRON, w, Walk("v1"), "universal", 2)
    assert res.homotopic
    assert replay_witness(KRON, w, Walk("v1"), res.witness)


def test_parallel_arrows_generic_only():
    a, b = Walk("v0", fwd("a0")), Walk("v0", fwd("b0"))
    res = walks_homotopic(KRON, a, b, "generic", 2)
    assert res.homotopic and replay_witness(KRON, a, b, res.witness, "generic")
    assert not replay_witness(KRON, a, b, res.witness, "universal")
    assert walks_homotopic(KRON, a, b, "universal", 8).verdict == "no_within_bound"


def test_mesh_square_is_homotopy():
    a, b = Walk("v0", fwd("a0", "a1")), Walk("v0", fwd("b0", "b1"))
    res = walks_homotopic(KRON, a, b, "universal", 2)
    assert res.homotopic and res.witness[0][0] == "mesh"
    assert replay_witness(KRON, a, b, res.witness)


def test_homotopy_preconditions():
    with pytest.raises(PreconditionError):
        walks_homotopic(KRON, Walk("v0", fwd("a0")), Walk("v0"), "universal", 3)
    with pytest.raises(PreconditionError):
        walks_homotopic(KRON, Walk("v0", fwd("a0", "a1")), Walk("v0", fwd("b0", "b1")), "universal", 1)
    with pytest.raises(PreconditionError):
        walks_homotopic(KRON, Walk("v0"), Walk("v0"), "simplicial", 1)


def test_forged_witness_rejected():
    a, b = Walk("v0", fwd("a0")), Walk("v0", fwd("b0"))
    forged = (("mesh", 0, (("a0", 1),), (("b0", 1),)),)
    assert not replay_witness(KRON, a, b, forged)


def test_triangle_is_simply_connected():
    tri = gen_triangle_An(3)
    ball = build_covering_ball(tri, "(1,1)", 8)
    assert ball.stable
    assert len(ball.delta.vertices) == len(tri.vertices)
    assert sorted(ball.pi_vertices.values()) == sorted(tri.vertices)
    assert check_covering(ball, tri).ok


def test_tube_unrolls():
    tube = gen_tube(1, 2)
    ball = build_covering_ball(tube, "(0,1)", 3)
    near = [v for v in ball.fiber("(0,1)") if len(ball.walks[v]) <= 2]
    assert len(near) > 1
    lifted = lift_path(ball, tube.path(("u0_1", "d0_1")), ball.basepoint)
    assert lifted.end != ball.basepoint
    assert ball.pi_vertices[lifted.end] == "(0,1)"


def test_radius_zero():
    ball = build_covering_ball(gen_tube(2, 3), "(0,1)", 0)
    assert list(ball.delta.vertices) == ["@"]
    assert not ball.delta.arrows
    assert check_covering(ball, gen_tube(2, 3)).ok


def test_tube_ball_passes_checks():
    q = gen_tube(2, 3)
    ball = build_covering_ball(q, "(0,1)", 4, "universal", 8)
    assert ball.stable
    assert check_covering(ball, q).ok


def test_corrupted_projection_is_reported():
    q = gen_tube(2, 3)
    ball = build_covering_ball(q, "(0,1)", 4)
    v = next(v for v in ball.delta.vertices if not ball.delta.is_frontier(v) and v != ball.basepoint)
    pi = dict(ball.pi_vertices)
    pi[v] = "(1,3)" if pi[v] != "(1,3)" else "(0,3)"
    broken = dataclasses.replace(ball, pi_vertices=pi)
    kinds = {x.kind for x in check_covering(broken, q).violations}
    assert kinds & {"pi-not-quiver-map", "tau-commute", "arrow-bijection"}


def test_cover_fixture_checks():
    ball = load_cover("tube_2x4_ball3.cover")
    assert check_covering(ball, gen_tube(2, 4)).ok


def test_build_errors():
    two = TranslationQuiver("two", [Vertex("u", True, True), Vertex("v", True, True)], [], {}, {})
    with pytest.raises(PreconditionError):
        build_covering_ball(two, "u", 1)
    with pytest.raises(QuiverError):
        build_covering_ball(KRON, "nowhere", 1)
    with pytest.raises(PreconditionError):
        build_covering_ball(KRON, "v0", -1)


def test_lift_errors():
    tube = gen_tube(1, 2)
    ball = build_covering_ball(tube, "(0,1)", 2)
    p = tube.path(("u0_1",))
    with pytest.raises(PreconditionError):
        lift_path(ball, p, "@u0_1")
    with pytest.raises(OutOfWindowError):
        lift_path(ball, tube.path(("u0_1", "d0_1", "u0_1", "d0_1")), ball.basepoint)
    e = tube.trivial_path("(0,1)")
    assert lift_path(ball, e, ball.basepoint).vertices == (ball.basepoint,)


def test_kronecker_universal_vs_generic():
    u = build_covering_ball(KRON, "v0", 3, "universal")
    g = build_covering_ball(KRON, "v0", 3, "generic")
    assert len(u.delta.vertices) > len(g.delta.vertices)
    assert not ball_isomorphic(u, g)
    f = ball_morphism(u, g)
    assert f is not None and set(f.values()) == set(g.delta.vertices)
    assert ball_isomorphic(u, u)


def test_generic_collapse_matches_universal_of_collapse():
    g = build_covering_ball(KRON, "v0", 4, "generic")
    collapsed, _ = collapse(KRON)
    u = build_covering_ball(collapsed, "v0", 4, "universal")
    assert ball_isomorphic(collapse_ball(g, KRON), u)


GRID = [
    gen_tube(1, 3),
    gen_tube(2, 4),
    gen_tube(3, 3),
    gen_triangle_An(4),
    gen_kronecker(4),
    gen_ztree(TreeSpec.linear(3), (0, 3)),
    gen_ztree(TreeSpec.dynkin("D4"), (0, 2)),
]


@pytest.mark.parametrize("q", GRID, ids=lambda q: q.name)
@pytest.mark.parametrize("kind", ["universal", "generic"])
def test_balls_are_coverings(q, kind):
    for base in sorted(q.vertices)[:3]:
        for r in range(6):
            ball = build_covering_ball(q, base, r, kind)
            assert ball.stable
            assert check_covering(ball, q).ok
            assert validate(ball.delta).ok


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(GRID), st.integers(0, 4), st.integers(0, 4), st.data())
def test_monotone_in_slack(q, r, s, data):
    base = data.draw(st.sampled_from(sorted(q.vertices)))
    small = build_covering_ball(q, base, r, "universal", s)
    big = build_covering_ball(q, base, r, "universal", s + 2)
    f = ball_morphism(small, big)
    assert f is not None
    assert set(f.values()) == set(big.delta.vertices)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(GRID[:5]), st.data())
def test_lifting_is_unique_and_projects(q, data):
    ball = build_covering_ball(q, sorted(q.vertices)[0], 5)
    inner = [v for v in ball.delta.vertices if len(ball.walks[v]) <= 2]
    start = data.draw(st.sampled_from(sorted(inner)))
    base_paths = [p for p in paths_from(q, ball.pi_vertices[start], 2)]
    p = data.draw(st.sampled_from(base_paths))
    one = lift_path(ball, p, start)
    two = lift_path(ball, p, start)
    assert one == two
    assert tuple(ball.pi_arrows[a] for a in one.arrows) == p.arrows
    assert tuple(ball.pi_vertices[v] for v in one.vertices) == p.vertices


@pytest.mark.parametrize("m", [3, 4, 5])
def test_generic_is_quotient_of_universal(m):
    q = gen_kronecker(m)
    for r in range(1, 5):
        u = build_covering_ball(q, "v0", r, "universal")
        g = build_covering_ball(q, "v0", r, "generic")
        f = ball_morphism(u, g)
        assert f is not None and set(f.values()) == set(g.delta.vertices)
