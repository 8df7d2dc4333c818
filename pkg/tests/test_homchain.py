import itertools

import numpy as np
import pytest

from minuscy import fp
from minuscy.homchain import DbEngine, Stalk


@pytest.fixture(scope="module")
def eng3():
    return DbEngine(3, 101)


def all_stalks(n, shifts):
    return [Stalk(s, a, b) for s in shifts for a in range(1, n + 1) for b in range(a, n + 1)]


def test_decompose_roundtrip_canonical(eng3):
    for s in all_stalks(3, range(-2, 3)):
        dec = eng3.decompose(eng3.proj_cpx(s))
        assert dec.stalks == [s]


def test_cone_of_generator_n2():
    eng = DbEngine(2, 101)
    s2 = Stalk(0, 2, 2)
    p1 = Stalk(0, 1, 2)
    g = eng.gen_chmap(s2, p1)
    cone, _, _ = eng.cone(g)
    dec = eng.decompose(cone)
    assert dec.stalks == [Stalk(0, 1, 1)]


def test_cone_of_identity_is_contractible(eng3):
    x = Stalk(0, 1, 2)
    g = eng3.gen_chmap(x, x)
    cone, _, _ = eng3.cone(g)
    dec = eng3.decompose(cone)
    assert dec.stalks == []


def test_cone_of_zero_map(eng3):
    x, y = Stalk(0, 1, 2), Stalk(0, 2, 3)
    from minuscy.homchain import ChMap
    z = ChMap(eng3.proj_cpx(x), eng3.proj_cpx(y), {})
    cone, _, _ = eng3.cone(z)
    dec = eng3.decompose(cone)
    assert sorted(dec.stalks) == sorted([y, Stalk(1, 1, 2)])


def test_class_coeff_of_generator_is_one(eng3):
    for s in all_stalks(3, (-1, 0, 1)):
        for t in all_stalks(3, (-1, 0, 1, 2)):
            if eng3.db_hom_kind(s, t) is not None:
                g = eng3.gen_chmap(s, t)
                assert eng3.class_coeff(g, s, t) == 1


def test_tau_objects_match_theory(eng3):
    # non-projective intervals translate by [a,b] -> [a+1,b+1]; projectives
    # P_a go to Sigma^{-1} I_a
    assert eng3.tau(Stalk(0, 1, 1)) == Stalk(0, 2, 2)
    assert eng3.tau(Stalk(0, 2, 2)) == Stalk(0, 3, 3)
    assert eng3.tau(Stalk(0, 1, 3)) == Stalk(-1, 1, 1)
    assert eng3.tau(Stalk(0, 2, 3)) == Stalk(-1, 1, 2)
    assert eng3.tauinv(Stalk(0, 2, 2)) == Stalk(0, 1, 1)
    assert eng3.tauinv(Stalk(0, 1, 1)) == Stalk(1, 1, 3)


def test_tau_fractional_cy_identity():
    # tau^{n+1} = Sigma^{-2} on every stalk, per rank
    for n in (1, 2, 3, 4):
        eng = DbEngine(n, 101)
        for s in all_stalks(n, (0, 1)):
            t = s
            for _ in range(n + 1):
                t = eng.tau(t)
            assert t == Stalk(s.shift - 2, s.a, s.b)


def test_sigma_twist_signs(eng3):
    s, t = Stalk(0, 2, 2), Stalk(0, 1, 2)
    assert eng3.db_hom_kind(s, t) == 0
    assert eng3.sigma_twist(1, s, t) == 1
    assert eng3.sigma_twist(2, s, t) == 1
    e, f = Stalk(0, 1, 1), Stalk(1, 2, 2)
    assert eng3.db_hom_kind(e, f) == 1
    assert eng3.sigma_twist(1, e, f) % 101 == 100  # -1
    assert eng3.sigma_twist(2, e, f) == 1


def test_tau_twists_are_units(eng3):
    for s in all_stalks(3, (0,)):
        for t in all_stalks(3, (0, 1)):
            if eng3.db_hom_kind(s, t) is not None:
                c = eng3.tauinv_twist(s, t)
                assert c % 101 != 0


def brute_db_hom_dim(eng, s, t):
    """Chain maps between resolutions modulo homotopy, by brute linear
    algebra on the (tiny) coefficient spaces."""
    src, tgt = eng.proj_cpx(s), eng.proj_cpx(t)
    degs = sorted(set(src.degrees()) & set(tgt.degrees()))
    positions = []
    for d in degs:
        for i, tiv in enumerate(tgt.comps[d]):
            for j, siv in enumerate(src.comps[d]):
                if eng.hom0(siv, tiv):
                    positions.append((d, i, j))
    # cocycle conditions exist wherever src[d] and tgt[d+1] are both present
    rows = []
    for d in sorted(set(src.degrees()) | set(tgt.degrees())):
        if (d + 1) not in tgt.comps or d not in src.comps:
            continue
        nr = len(tgt.comps[d + 1])
        nc = len(src.comps.get(d, []))
        for i in range(nr):
            for j in range(nc):
                row = np.zeros(len(positions), dtype=np.int64)
                for k, (dd, ii, jj) in enumerate(positions):
                    if dd == d and eng.hom0(src.comps[d][j], tgt.comps[d + 1][i]):
                        row[k] += tgt.diff(d)[i, ii] if jj == j else 0
                    if dd == d + 1 and (d + 1) in src.comps and ii == i:
                        if eng.hom0(src.comps[d][j], tgt.comps[d + 1][i]):
                            row[k] -= src.diff(d)[jj, j] if True else 0
                if row.any():
                    rows.append(row)
    ncyc = len(positions) - (fp.rank(np.stack(rows), eng.p) if rows else 0)
    # homotopies
    hcols = []
    for d0 in src.degrees():
        if (d0 - 1) not in tgt.comps:
            continue
        for i in range(len(tgt.comps[d0 - 1])):
            for j in range(len(src.comps[d0])):
                if not eng.hom0(src.comps[d0][j], tgt.comps[d0 - 1][i]):
                    continue
                h = np.zeros((len(tgt.comps[d0 - 1]), len(src.comps[d0])), dtype=np.int64)
                h[i, j] = 1
                col = np.zeros(len(positions), dtype=np.int64)
                bnd = {}
                if d0 in tgt.comps:
                    bnd[d0] = eng.smul(tgt.diff(d0 - 1), h, src.comps[d0], tgt.comps[d0])
                if (d0 - 1) in src.comps:
                    m2 = eng.smul(h, src.diff(d0 - 1), src.comps[d0 - 1], tgt.comps[d0 - 1])
                    bnd[d0 - 1] = (bnd.get(d0 - 1, np.zeros_like(m2)) + m2) % eng.p
                for k, (dd, ii, jj) in enumerate(positions):
                    if dd in bnd:
                        col[k] = bnd[dd][ii, jj]
                hcols.append(col)
    nb = fp.rank(np.stack(hcols, axis=1), eng.p) if hcols else 0
    return ncyc - nb


def test_db_hom_dims_match_brute_force_n3(eng3):
    for s in all_stalks(3, range(-2, 3)):
        for t in all_stalks(3, range(-2, 3)):
            expected = 1 if eng3.db_hom_kind(s, t) is not None else 0
            got = brute_db_hom_dim(eng3, s, t)
            assert got == expected, (s, t, got, expected)


def test_compose_gens_structure_constants(eng3):
    # exhaustive: composition of two degree-0 canonical generators is 0 or 1
    stalks = all_stalks(3, (0,))
    for s in stalks:
        for m in stalks:
            if eng3.db_hom_kind(s, m) != 0:
                continue
            for t in stalks:
                if eng3.db_hom_kind(m, t) != 0:
                    continue
                assert eng3.compose_gens(s, m, t) in (0, 1)


def test_decompose_random_cones_consistent(eng3):
    # homology dimensions of the decomposition match vertex-wise ranks
    import random
    rng = random.Random(5)
    stalks = all_stalks(3, (0, 1))
    for _ in range(30):
        s, t = rng.choice(stalks), rng.choice(stalks)
        if eng3.db_hom_kind(s, t) is None:
            continue
        g = eng3.gen_chmap(s, t)
        cone, inc, proj = eng3.cone(g)
        dec = eng3.decompose(cone)
        # psi is a degreewise iso: dims agree
        for d in dec.can.degrees():
            assert len(dec.can.comps[d]) == len(cone.comps[d])
