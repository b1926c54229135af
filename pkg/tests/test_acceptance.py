"""Acceptance criteria, one test each.  Every test prints a PASS/FAIL line.

Run standalone with ``python3 tests/test_acceptance.py`` for just the lines.
"""
import itertools
import json
import os
import random
import subprocess
import sys
import time
from pathlib import Path as FsPath

import pytest

sys.path.insert(0, str(FsPath(__file__).parent))

from conftest import ACCEPTANCE, FIXTURES  # noqa: E402
from meshkit.covering import ball_isomorphic, build_covering_ball, check_covering, collapse_ball  # noqa: E402
from meshkit.criteria import (  # noqa: E402
    IN_RAD_N_PLUS_1,
    depth_certificate,
    radical_verdict,
    replay_certificate,
    theoremB_fiber_sum,
)
from meshkit.errors import OutOfWindowError  # noqa: E402
from meshkit.generators import TreeSpec, gen_kronecker, gen_triangle_An, gen_tube, gen_ztree  # noqa: E402
from meshkit.linalg import VectorInBasis, membership  # noqa: E402
from meshkit.mesh import class_of_path, graded_dims, hom_space, mesh_relation_class  # noqa: E402
from meshkit.oracle import oracle_class_is_zero, oracle_depth_search, oracle_hom_dim  # noqa: E402
from meshkit.quiver import collapse, is_sectional, paths_from, validate  # noqa: E402
from meshkit.textio import emit_covering, emit_quiver, normalize_text, parse_covering, parse_quiver  # noqa: E402

FIELD = "rational"


def _grid():
    out = []
    for tree in (TreeSpec.linear(2), TreeSpec.linear(3), TreeSpec.dynkin("D4")):
        for i0 in range(-2, 1):
            for length in range(1, 7):
                out.append(gen_ztree(tree, (i0, i0 + length)))
    out += [gen_tube(p, h) for p in (1, 2, 3) for h in range(2, 7)]
    out += [gen_triangle_An(n) for n in range(1, 7)]
    out += [gen_kronecker(m) for m in range(2, 7)]
    return out


def criterion_1():
    t = time.perf_counter()
    grid = _grid()
    bad = [q.name for q in grid if not validate(q).ok]
    dt = time.perf_counter() - t
    return not bad and dt < 5, f"{len(grid)} generated quivers, {len(bad)} invalid, {dt:.2f}s (< 5s)"


def criterion_2():
    t = time.perf_counter()
    checked = failures = 0
    for q in _grid():
        for x in q.vertices:
            if q.is_projective(x) or q.is_frontier(x):
                continue
            checked += 1
            failures += not mesh_relation_class(q, x, FIELD).is_zero
    dt = time.perf_counter() - t
    return failures == 0 and checked > 0 and dt < 30, (
        f"{checked} meshes, {failures} nonzero, {dt:.2f}s (< 30s)"
    )


def criterion_3():
    t = time.perf_counter()
    quivers = [
        gen_triangle_An(5),
        gen_tube(3, 6),
        gen_ztree(TreeSpec.linear(3), (-3, 6)),
        gen_ztree(TreeSpec.linear(3), (0, 4)),
    ]
    checked = failures = 0
    for q in quivers:
        for x in q.vertices:
            for p in paths_from(q, x, 6):
                try:
                    if not is_sectional(q, p):
                        continue
                except OutOfWindowError:
                    continue
                if not hom_space(q, p.start, p.end, p.length, FIELD).exact:
                    continue
                checked += 1
                failures += class_of_path(q, p, FIELD).is_zero
    dt = time.perf_counter() - t
    return failures == 0 and checked > 0 and dt < 120, (
        f"{checked} sectional paths with exact hom space, {failures} zero, {dt:.2f}s (< 120s)"
    )


def criterion_4():
    q = gen_triangle_An(4)
    checked = mismatches = zeros = 0
    for x in sorted(q.vertices):
        for p in paths_from(q, x, 5):
            cls = class_of_path(q, p, FIELD)
            hs = cls.hom
            inside = membership(VectorInBasis.unit(hs.basis, p), hs.relations).inside
            verdict = radical_verdict(q, p, FIELD).verdict == IN_RAD_N_PLUS_1
            oracle_zero = oracle_class_is_zero(q, p.arrows, p.start)
            dims_agree = hs.quotient_dim == oracle_hom_dim(q, p.start, p.end, p.length)
            checked += 1
            zeros += cls.is_zero
            if not (cls.is_zero == inside == verdict == oracle_zero and dims_agree):
                mismatches += 1
    return mismatches == 0, f"{checked} paths of length <= 5 ({zeros} zero), {mismatches} mismatches"


def criterion_5():
    t = time.perf_counter()
    cases = [(gen_tube(2, 4), ["(0,1)", "(1,3)"]), (gen_tube(1, 3), ["(0,1)", "(0,2)"]), (gen_kronecker(4), ["v0", "v2"])]
    balls = failures = 0
    for q, bases in cases:
        for base, kind, r in itertools.product(bases, ("universal", "generic"), range(6)):
            ball = build_covering_ball(q, base, r, kind)
            balls += 1
            failures += not (ball.stable and check_covering(ball, q).ok)
    dt = time.perf_counter() - t
    return failures == 0 and dt < 60, f"{balls} balls, {failures} unstable or failing checks, {dt:.2f}s (< 60s)"


def criterion_6():
    t = time.perf_counter()
    k = gen_kronecker(8)
    collapsed, _ = collapse(k)
    generic = build_covering_ball(k, "v0", 4, "generic")
    universal_of_collapse = build_covering_ball(collapsed, "v0", 4, "universal")
    same = ball_isomorphic(collapse_ball(generic, k), universal_of_collapse)
    u3 = build_covering_ball(k, "v0", 3, "universal")
    g3 = build_covering_ball(k, "v0", 3, "generic")
    differ = not ball_isomorphic(u3, g3) and len(u3.delta.vertices) > len(g3.delta.vertices)
    dt = time.perf_counter() - t
    return same and differ and dt < 10, (
        f"collapse(generic) ~ universal(collapse) at r=4: {same}; "
        f"universal ({len(u3.delta.vertices)} vertices) vs generic ({len(g3.delta.vertices)}) at r=3 differ: {differ}; "
        f"{dt:.2f}s (< 10s)"
    )


def criterion_7():
    t = time.perf_counter()
    checked = mismatches = dependent = nonzero = 0
    for q in (gen_tube(1, 8), gen_tube(2, 8)):
        ball = build_covering_ball(q, "(0,1)", 8, "universal")
        if not ball.stable:
            return False, f"ball over {q.name} is unstable"
        for n in range(7):
            for X, Y in itertools.product(sorted(q.vertices), repeat=2):
                base = hom_space(q, X, Y, n, FIELD)
                if not base.exact:
                    continue
                values = set()
                for x in ball.fiber(X):
                    try:
                        total = theoremB_fiber_sum(ball, x, Y, n, FIELD).total
                    except OutOfWindowError:
                        continue
                    values.add(total)
                    checked += 1
                    nonzero += total > 0
                    mismatches += total != base.quotient_dim
                dependent += len(values) > 1
    dt = time.perf_counter() - t
    ok = mismatches == 0 and dependent == 0 and checked > 0 and dt < 120
    return ok, (
        f"{checked} (fiber representative, Y, n) checks ({nonzero} nonzero), {mismatches} mismatches, "
        f"{dependent} representative-dependent, {dt:.2f}s (< 120s)"
    )


def criterion_8():
    q = gen_tube(2, 6)
    pool = []
    for x in sorted(q.vertices):
        for p in paths_from(q, x, 4):
            if p.length == 0:
                continue
            try:
                if class_of_path(q, p, FIELD).is_zero:
                    pool.append(p)
            except OutOfWindowError:
                continue
    rng = random.Random(20240601)
    done = mismatches = certificates = skipped = 0
    while done < 50:
        p = rng.choice(pool)
        m, cap = rng.randint(1, 4), rng.randint(2, 4)
        try:
            cert = depth_certificate(q, p, m, cap, FIELD)
        except OutOfWindowError:
            skipped += 1
            continue
        found = oracle_depth_search(q, p.start, p.arrows, m, cap)
        done += 1
        if cert is not None:
            certificates += 1
            if not replay_certificate(q, cert, FIELD):
                mismatches += 1
        if (cert is None) != (found is None) or (cert and cert.total_degree != found[0]):
            mismatches += 1
    return mismatches == 0, (
        f"50 sampled zero-class paths (pool {len(pool)}, {skipped} inexact draws redrawn), "
        f"{certificates} certificates, {mismatches} mismatches"
    )


def criterion_9():
    za3 = gen_ztree(TreeSpec.linear(3), (-3, 4))
    za2 = gen_ztree(TreeSpec.linear(2), (-3, 4))
    tri = gen_triangle_An(3)
    values = {
        "ZA_3 dim_2((0,2),(1,2))": (hom_space(za3, "(0,2)", "(1,2)", 2, FIELD).quotient_dim, 1),
        "ZA_2 dim_2((0,1),(1,1))": (hom_space(za2, "(0,1)", "(1,1)", 2, FIELD).quotient_dim, 0),
        "triangle A_3 dim_3((2,3),(1,1))": (graded_dims(tri, "(2,3)", "(1,1)", 3, FIELD)[3].dim, 0),
    }
    oracle = {
        "ZA_3 dim_2((0,2),(1,2))": oracle_hom_dim(za3, "(0,2)", "(1,2)", 2),
        "ZA_2 dim_2((0,1),(1,1))": oracle_hom_dim(za2, "(0,1)", "(1,1)", 2),
        "triangle A_3 dim_3((2,3),(1,1))": oracle_hom_dim(tri, "(2,3)", "(1,1)", 3),
    }
    ok = all(got == want == oracle[k] for k, (got, want) in values.items())
    return ok, "; ".join(f"{k} = {got} (expected {want}, oracle {oracle[k]})" for k, (got, want) in values.items())


REPORT_COMMANDS = [
    ["mesh-dim", "za3.q", "--from", "(0,2)", "--to", "(1,2)", "--deg", "2"],
    ["verdict", "za2.q", "--path", "b0,a0"],
    ["compose", "za3.q", "--path", "a0_2_3,b0_2_3"],
    ["dims-table", "triangle_a3.q", "--from", "(2,3)", "--max-deg", "4"],
    ["cover", "kronecker4.q", "--base", "v0", "--radius", "3"],
    ["check-cover", "tube_2x4_ball3.cover", "--base", "tube_2x4.q"],
    ["fiber-sum", "--cover", "tube_2x4_ball3.cover", "--x", "@", "--Y", "(0,2)", "--deg", "1"],
    ["mesh2", "triangle_a3.q", "--vertex", "(1,2)", "--cap", "6"],
    ["depth", "synthetic_bypass.q", "--path", "f,g", "--max-extra", "2", "--cap", "3"],
]


def _report_run(seed: str) -> bytes:
    env = dict(os.environ, PYTHONHASHSEED=seed, MESHKIT_FIELD="rational")
    chunks = []
    for argv in REPORT_COMMANDS:
        proc = subprocess.run(
            [sys.executable, "-m", "meshkit", *argv, "--json"],
            cwd=FIXTURES,
            capture_output=True,
            env=env,
        )
        json.loads(proc.stdout)  # each report is one JSON document
        chunks.append(proc.stdout)
    return b"".join(chunks)


def criterion_10():
    fixtures = sorted(FIXTURES.glob("*.q"))
    bad = [f.name for f in fixtures if emit_quiver(parse_quiver(f.read_text())) != normalize_text(f.read_text())]
    covers = sorted(FIXTURES.glob("*.cover"))
    bad += [f.name for f in covers if emit_covering(parse_covering(f.read_text())) != normalize_text(f.read_text())]
    first, second = _report_run("1"), _report_run("2")
    same = first == second
    return not bad and same, (
        f"{len(fixtures) + len(covers)} fixtures round-trip ({len(bad)} failures); "
        f"{len(REPORT_COMMANDS)} JSON reports byte-identical across two runs: {same}"
    )


CRITERIA = {
    1: ("generator validity", criterion_1),
    2: ("mesh vanishing", criterion_2),
    3: ("sectional nonvanishing", criterion_3),
    4: ("zero class <=> relation membership <=> verdict <=> oracle", criterion_4),
    5: ("covering axioms and stability", criterion_5),
    6: ("collapse of generic ball vs universal ball of collapse", criterion_6),
    7: ("fiber-sum dimension identity", criterion_7),
    8: ("depth certificates vs oracle", criterion_8),
    9: ("specific derived values", criterion_9),
    10: ("round trip and determinism", criterion_10),
}


def _run(k: int) -> tuple[bool, str]:
    title, fn = CRITERIA[k]
    ok, detail = fn()
    ACCEPTANCE[k] = (ok, f"{title}: {detail}")
    print(f"{'PASS' if ok else 'FAIL'} criterion {k}: {title}: {detail}")
    return ok, detail


@pytest.mark.parametrize("k", sorted(CRITERIA))
def test_criterion(k):
    ok, detail = _run(k)
    assert ok, detail


if __name__ == "__main__":
    results = [_run(k)[0] for k in sorted(CRITERIA)]
    sys.exit(0 if all(results) else 1)
