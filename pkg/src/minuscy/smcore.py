"""Approximation and simple-minded-system machinery over a category snapshot.

Everything here is written against a small context protocol (ambient D or a
reduced Z): objects are multiplicity vectors, shifts are permutations, cones
come from the context.  Torsion decompositions with respect to (<S>, S-perp)
are computed by a greedy one-simple-strip descent whose termination and
correctness follow from the orthogonal-collection lemmas: any nonzero map
s -> c factors through the torsion part and stripping it drops the S-length
by one while fixing the torsion-free residual.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

import numpy as np

from .orbit import CategorySnapshot, ObjectVector, OrbitMorphism, OrbitError


class NotOrthogonal(OrbitError):
    pass


class NotInClosure(OrbitError):
    pass


class AmbientContext:
    """The snapshot itself as a triangulated context."""

    def __init__(self, cat: CategorySnapshot):
        self.cat = cat
        self.inds = list(range(cat.N))
        self._closures: Dict[FrozenSet[int], "ClosureTable"] = {}

    @property
    def p(self):
        return self.cat.p

    def shift_vec(self, v: ObjectVector, k: int = 1) -> ObjectVector:
        return self.cat.shift_vec(v, k)

    def shift_id(self, x: int, k: int = 1) -> int:
        perm = self.cat.perm_shift if k > 0 else self.cat.perm_shift_inv
        for _ in range(abs(k)):
            x = int(perm[x])
        return x

    def cone_vec(self, f: OrbitMorphism) -> ObjectVector:
        return self.cat.cone_fingerprint(f)[0]

    def hom_dim(self, x: ObjectVector, y: ObjectVector) -> int:
        return self.cat.hom_dim(x, y)

    def name(self, x: int) -> str:
        return self.cat.indecs[x].name


@dataclass
class DecompositionTriangle:
    """s_d -> d -> z_d with s_d in <S> and z_d in S-perp, plus witnesses."""

    s_part: ObjectVector
    middle: ObjectVector
    residual: ObjectVector
    strips: List[int]  # ids of the S-members stripped, in order


@dataclass
class ClosureTable:
    """Graded extension closure (S)_n with length and witness data."""

    ctx: AmbientContext
    S: Tuple[int, ...]
    levels: List[Set[Tuple[int, ...]]]
    ind: Set[int]
    _processed: Set[Tuple[Tuple[int, ...], int]] = field(default_factory=set)

    def level(self, n: int) -> Set[Tuple[int, ...]]:
        while len(self.levels) < n + 1:
            _extend_closure(self)
        return self.levels[n]

    def contains_vec(self, v: ObjectVector) -> bool:
        return all(int(v[i]) == 0 or i in self.ind for i in range(len(v)))


def collection_ok(cat: CategorySnapshot, S: Iterable[int]) -> Tuple[int, ...]:
    ids = tuple(sorted(set(int(s) for s in S)))
    for s in ids:
        if not (0 <= s < cat.N):
            raise ValueError(f"unknown indecomposable id {s}")
    return ids


def is_w_orthogonal(ctx: AmbientContext, S: Iterable[int], w: int):
    """Definition check; returns (ok, certificate) with the violating pair."""
    cat = ctx.cat
    ids = collection_ok(cat, S)
    for x in ids:
        for y in ids:
            expect = 1 if x == y else 0
            vx, vy = cat.vec_of([x]), cat.vec_of([y])
            if ctx.hom_dim(vx, vy) != expect:
                return False, ("hom", x, y, 0)
            for k in range(1, w):
                if ctx.hom_dim(ctx.shift_vec(vx, k), vy) != 0:
                    return False, ("shifted-hom", x, y, k)
    return True, None


def first_nonzero_map(ctx: AmbientContext, src: Sequence[int], tgt: Sequence[int]) -> Optional[OrbitMorphism]:
    cat = ctx.cat
    for i, t in enumerate(tgt):
        for j, s in enumerate(src):
            basis = cat.hom_entries(s, t)
            if basis:
                return cat.morphism_from_coeffs(src, tgt, [(i, j, 0)], [1])
    return None


def descent_residual(ctx: AmbientContext, S: Sequence[int], d: ObjectVector,
                     with_source: bool = False) -> DecompositionTriangle:
    """Torsion decomposition of d with respect to (<S>, S-perp): strip one
    nonzero map s -> c at a time; the residual is the minimal one.  The
    iso class of the <S>-part is only computed when asked for."""
    cat = ctx.cat
    c = d.copy()
    strips: List[int] = []
    cap = int(2 + 2 * (cat.cartan @ d).sum())
    while True:
        sigma = None
        chosen = None
        for s in S:
            m = first_nonzero_map(ctx, (s,), cat.slots_of(c))
            if m is not None:
                sigma, chosen = m, s
                break
        if sigma is None:
            break
        if len(strips) > cap:
            raise OrbitError("descent did not terminate within the mass bound")
        c = ctx.cone_vec(sigma)
        strips.append(chosen)
    s_part = _approx_source(ctx, S, d, c, strips) if with_source else cat.zero_vec()
    return DecompositionTriangle(s_part, d, c, strips)


def co_descent_residual(ctx: AmbientContext, S: Sequence[int], d: ObjectVector,
                        with_source: bool = False) -> DecompositionTriangle:
    """Dual decomposition with respect to (perp-S, <S>): strip maps d -> s;
    the residual is the co-torsion part in perp(S)."""
    cat = ctx.cat
    c = d.copy()
    strips: List[int] = []
    cap = int(2 + 2 * (cat.cartan @ d).sum())
    while True:
        sigma = None
        chosen = None
        for s in S:
            m = first_nonzero_map(ctx, cat.slots_of(c), (s,))
            if m is not None:
                sigma, chosen = m, s
                break
        if sigma is None:
            break
        if len(strips) > cap:
            raise OrbitError("co-descent did not terminate within the mass bound")
        c = ctx.shift_vec(ctx.cone_vec(sigma), -1)
        strips.append(chosen)
    s_part = _co_approx_source(ctx, S, d, c, strips) if with_source else cat.zero_vec()
    return DecompositionTriangle(s_part, d, c, strips)


def _approx_source(ctx, S, d, resid, strips) -> ObjectVector:
    """Iso class of the <S>-part via the universal cover and Lemma 1.1(2)-(3):
    cone(cover) = residual + Sigma(split-off), so vector arithmetic recovers
    the minimal source."""
    cat = ctx.cat
    closure_inds = closure_ind_set(ctx, S)
    cover_slots: List[int] = []
    positions = []
    dslots = cat.slots_of(d)
    for t in sorted(closure_inds):
        for i, ds in enumerate(dslots):
            for b in range(len(cat.hom_entries(t, ds))):
                positions.append((i, len(cover_slots), b))
                cover_slots.append(t)
    if not cover_slots:
        return cat.zero_vec()
    ev = cat.morphism_from_coeffs(tuple(cover_slots), dslots, positions, [1] * len(positions))
    z_any = ctx.cone_vec(ev)
    junk = ctx.shift_vec(z_any - resid, -1)
    if (z_any - resid < 0).any() or (junk < 0).any():
        raise OrbitError("approximation bookkeeping produced negative multiplicities")
    s_part = cat.vec_of(cover_slots) - junk
    if (s_part < 0).any():
        raise OrbitError("approximation bookkeeping produced negative multiplicities")
    return s_part


def _co_approx_source(ctx, S, d, resid, strips) -> ObjectVector:
    cat = ctx.cat
    closure_inds = closure_ind_set(ctx, S)
    cover_slots: List[int] = []
    positions = []
    dslots = cat.slots_of(d)
    for t in sorted(closure_inds):
        for i, ds in enumerate(dslots):
            for b in range(len(cat.hom_entries(ds, t))):
                positions.append((len(cover_slots), i, b))
                cover_slots.append(t)
    if not cover_slots:
        return cat.zero_vec()
    ev = cat.morphism_from_coeffs(dslots, tuple(cover_slots), positions, [1] * len(positions))
    # triangle resid -> d -> s-part-with-junk: cocone of the left cover
    z_any = ctx.shift_vec(ctx.cone_vec(ev), -1)
    junk = ctx.shift_vec(z_any - resid, 1)
    if (z_any - resid < 0).any() or (junk < 0).any():
        raise OrbitError("co-approximation bookkeeping produced negative multiplicities")
    s_part = cat.vec_of(cover_slots) - junk
    if (s_part < 0).any():
        raise OrbitError("co-approximation bookkeeping produced negative multiplicities")
    return s_part


def closure_ind_set(ctx: AmbientContext, S: Sequence[int]) -> Set[int]:
    """Indecomposables of the extension closure <S>: exactly those whose
    torsion-free residual vanishes."""
    key = ("ind", tuple(sorted(S)))
    cache = ctx.__dict__.setdefault("_ind_cache", {})
    if key not in cache:
        out = set()
        for d in ctx.inds:
            v = ctx.cat.vec_of([d])
            c = v.copy()
            cat = ctx.cat
            steps = 0
            cap = int(2 + 2 * (cat.cartan @ v).sum())
            while True:
                m = None
                for s in sorted(S):
                    m = first_nonzero_map(ctx, (s,), cat.slots_of(c))
                    if m is not None:
                        break
                if m is None:
                    break
                steps += 1
                if steps > cap:
                    raise OrbitError("closure membership descent did not terminate")
                c = ctx.cone_vec(m)
            if not c.any():
                out.add(d)
        cache[key] = out
    return cache[key]


def extension_closure(ctx: AmbientContext, S: Iterable[int]) -> ClosureTable:
    cat = ctx.cat
    ids = collection_ok(cat, S)
    ok, cert = is_w_orthogonal(ctx, ids, 1)
    if not ok:
        raise NotOrthogonal(f"collection is not orthogonal: {cert}")
    key = frozenset(ids)
    if key in ctx._closures:
        return ctx._closures[key]
    level1: Set[Tuple[int, ...]] = {tuple(cat.vec_of([s]).tolist()) for s in ids}
    level1.add(tuple(cat.zero_vec().tolist()))
    table = ClosureTable(ctx, ids, [ {tuple(cat.zero_vec().tolist())}, level1], closure_ind_set(ctx, ids))
    ctx._closures[key] = table
    return table


def _summand_closure(vecs: Set[Tuple[int, ...]]) -> Set[Tuple[int, ...]]:
    import itertools
    out: Set[Tuple[int, ...]] = set()
    for v in vecs:
        ranges = [range(x + 1) for x in v]
        total = 1
        for r in ranges:
            total *= len(r)
        if total > 4096:
            # keep only coordinatewise-minors reachable by single decrements;
            # iterated closure below completes the downset
            out.add(v)
            for i, x in enumerate(v):
                if x:
                    w = list(v)
                    w[i] -= 1
                    out.add(tuple(w))
            continue
        for sub in itertools.product(*ranges):
            out.add(tuple(sub))
    return out


def _extend_closure(table: ClosureTable) -> None:
    ctx, cat = table.ctx, table.ctx.cat
    prev = table.levels[-1]
    new: Set[Tuple[int, ...]] = set(prev)
    for yt in sorted(prev):
        y = np.array(yt, dtype=np.int64)
        yslots = cat.slots_of(y)
        for s in table.S:
            if (yt, s) in table._processed:
                continue
            table._processed.add((yt, s))
            ssh = ctx.shift_vec(cat.vec_of([s]), 1)
            sslots = cat.slots_of(ssh)
            positions = cat.hom_basis_elements(yslots, sslots)
            for h in _projective_hom_elements(cat, yslots, sslots, positions):
                x = ctx.shift_vec(ctx.cone_vec(h), -1)
                new.add(tuple(x.tolist()))
    table.levels.append(_summand_closure(new))


def _projective_hom_elements(cat, src, tgt, positions):
    """All Hom elements up to scalar (cones only depend on the scalar class),
    plus the zero map."""
    import itertools
    p = cat.p
    yield cat.morphism_from_coeffs(src, tgt, [], [])
    ncoords = len(positions)
    for lead in range(ncoords):
        for rest in itertools.product(range(p), repeat=ncoords - lead - 1):
            coeffs = [0] * lead + [1] + list(rest)
            yield cat.morphism_from_coeffs(src, tgt, positions, coeffs)


def s_length(table: ClosureTable, x: ObjectVector) -> Tuple[int, List[Tuple[int, Tuple[int, ...]]]]:
    """Minimal n with x in (S)_n plus a quotient-form composition series
    (pairs (s_i, intermediate object) read off the dual descent)."""
    ctx, cat = table.ctx, table.ctx.cat
    xt = tuple(np.asarray(x, dtype=np.int64).tolist())
    if not any(xt):
        return 0, []
    if not table.contains_vec(np.array(xt, dtype=np.int64)):
        raise NotInClosure("object is not in the extension closure")
    n = 0
    while xt not in table.level(n):
        n += 1
        if n > 4 * int(sum(xt)) + 4:
            raise NotInClosure("membership not witnessed within the length bound")
    dec = co_descent_residual(ctx, table.S, np.array(xt, dtype=np.int64))
    if dec.residual.any():
        raise NotInClosure("dual descent left a nonzero residual")
    series: List[Tuple[int, Tuple[int, ...]]] = []
    c = np.array(xt, dtype=np.int64)
    for s in dec.strips:
        m = first_nonzero_map(ctx, cat.slots_of(c), (s,))
        c = ctx.shift_vec(ctx.cone_vec(m), -1)
        series.append((s, tuple(c.tolist())))
    return n, series


def perp(ctx: AmbientContext, S: Iterable[int], side: str, w: int) -> Set[int]:
    """S^{perp_w} (right) or {}^{perp_w}S (left); the index i runs over
    0..w inclusive, following the reduction-section convention."""
    cat = ctx.cat
    ids = collection_ok(cat, S)
    out = set()
    for d in ctx.inds:
        vd = cat.vec_of([d])
        ok = True
        for s in ids:
            vs = cat.vec_of([s])
            for i in range(0, w + 1):
                if side == "right":
                    if ctx.hom_dim(ctx.shift_vec(vs, i), vd):
                        ok = False
                        break
                else:
                    if ctx.hom_dim(vd, ctx.shift_vec(vs, -i)):
                        ok = False
                        break
            if not ok:
                break
        if ok:
            out.add(d)
    return out


def min_right_approx(ctx: AmbientContext, S: Iterable[int], d: ObjectVector) -> DecompositionTriangle:
    ids = collection_ok(ctx.cat, S)
    return descent_residual(ctx, ids, d, with_source=True)


def min_left_approx(ctx: AmbientContext, S: Iterable[int], d: ObjectVector) -> DecompositionTriangle:
    ids = collection_ok(ctx.cat, S)
    return co_descent_residual(ctx, ids, d, with_source=True)


def right_mutation(ctx: AmbientContext, S: Iterable[int], d: ObjectVector) -> ObjectVector:
    """mu^-(d): cone of the minimal right <S>-approximation of Sigma d."""
    return min_right_approx(ctx, S, ctx.shift_vec(d, 1)).residual


def left_mutation(ctx: AmbientContext, S: Iterable[int], d: ObjectVector) -> ObjectVector:
    """mu^+(d): cocone of the minimal left <S>-approximation of Sigma^{-1} d."""
    return min_left_approx(ctx, S, ctx.shift_vec(d, -1)).residual


def is_mutation_pair(ctx: AmbientContext, S: Iterable[int], X: Set[int], Y: Set[int]):
    """Definition check for an S-mutation pair, as equalities of
    indecomposable-supported sets; returns (ok, certificate)."""
    cat = ctx.cat
    ids = collection_ok(cat, S)
    sperp = perp_plain(ctx, ids, "right")
    perps = perp_plain(ctx, ids, "left")
    if not set(Y) <= sperp or not set(X) <= perps:
        raise OrbitError("mutation-pair test requires Y in S-perp and X in perp-S")
    lhs_x = set()
    for dd in ctx.inds:
        vd = cat.vec_of([dd])
        if dd not in sperp or dd not in perps:
            continue
        ok = all(ctx.hom_dim(vd, ctx.shift_vec(cat.vec_of([s]), -1)) == 0 for s in ids)
        if not ok:
            continue
        resid = descent_residual(ctx, ids, ctx.shift_vec(vd, 1)).residual
        if set(np.nonzero(resid)[0].tolist()) <= set(Y):
            lhs_x.add(dd)
    if lhs_x != set(X):
        return False, ("X", tuple(sorted(lhs_x ^ set(X))))
    lhs_y = set()
    for dd in ctx.inds:
        vd = cat.vec_of([dd])
        if dd not in sperp or dd not in perps:
            continue
        ok = all(ctx.hom_dim(ctx.shift_vec(cat.vec_of([s]), 1), vd) == 0 for s in ids)
        if not ok:
            continue
        resid = co_descent_residual(ctx, ids, ctx.shift_vec(vd, -1)).residual
        if set(np.nonzero(resid)[0].tolist()) <= set(X):
            lhs_y.add(dd)
    if lhs_y != set(Y):
        return False, ("Y", tuple(sorted(lhs_y ^ set(Y))))
    return True, None


def perp_plain(ctx: AmbientContext, S: Sequence[int], side: str) -> Set[int]:
    cat = ctx.cat
    out = set()
    for d in ctx.inds:
        vd = cat.vec_of([d])
        if side == "right":
            if all(ctx.hom_dim(cat.vec_of([s]), vd) == 0 for s in S):
                out.add(d)
        else:
            if all(ctx.hom_dim(vd, cat.vec_of([s])) == 0 for s in S):
                out.add(d)
    return out


def riedtmann_check(ctx: AmbientContext, S: Iterable[int], w: int, side: str = "both"):
    """Left/right w-Riedtmann configuration test; returns (ok, witness)."""
    cat = ctx.cat
    ids = collection_ok(cat, S)
    ok, cert = is_w_orthogonal(ctx, ids, w)
    if not ok:
        raise NotOrthogonal(f"collection is not {w}-orthogonal: {cert}")
    for d in ctx.inds:
        vd = cat.vec_of([d])
        if side in ("left", "both"):
            if all(ctx.hom_dim(ctx.shift_vec(cat.vec_of([s]), k), vd) == 0
                   for s in ids for k in range(w)):
                return False, ("left", d)
        if side in ("right", "both"):
            if all(ctx.hom_dim(ctx.shift_vec(vd, k), cat.vec_of([s])) == 0
                   for s in ids for k in range(w)):
                return False, ("right", d)
    return True, None


def in_shifted_closure_product(ctx: AmbientContext, S: Sequence[int], w: int,
                               d: ObjectVector) -> bool:
    """d in <S> * Sigma^{-1}<S> * ... * Sigma^{1-w}<S>, decided by iterated
    torsion decompositions (each factor is stripped exactly)."""
    r = d.copy()
    for k in range(w):
        Sk = [ctx.shift_id(s, -k) for s in S] if k else list(S)
        r = descent_residual(ctx, Sk, r).residual
    return not r.any()


def is_w_sms(ctx: AmbientContext, S: Iterable[int], w: int) -> bool:
    """w-orthogonal and the shifted extension closures generate everything."""
    cat = ctx.cat
    ids = collection_ok(cat, S)
    ok, _ = is_w_orthogonal(ctx, ids, w)
    if not ok:
        raise NotOrthogonal("collection is not w-orthogonal")
    for d in ctx.inds:
        if not in_shifted_closure_product(ctx, ids, w, cat.vec_of([d])):
            return False
    return True


def reverse_order_check(ctx: AmbientContext, S: Iterable[int], w: int,
                        length_budget: int = 4) -> bool:
    """Lemma-style inclusion <S> * Sigma^i <S> inside Sigma^i <S> * <S> for
    0 < i < w, materialized up to an S-length budget per factor."""
    cat = ctx.cat
    ids = collection_ok(cat, S)
    if w < 2:
        return True
    table = extension_closure(ctx, ids)
    members = set()
    for n in range(length_budget + 1):
        members |= table.level(n)
    for i in range(1, w):
        shifted_ids = [ctx.shift_id(s, i) for s in ids]
        for xt in sorted(members):
            x = np.array(xt, dtype=np.int64)
            xs = ctx.shift_vec(x, 0)
            for yt in sorted(members):
                y = ctx.shift_vec(np.array(yt, dtype=np.int64), i)
                # extensions e with triangle x -> e -> y
                yslots = cat.slots_of(y)
                xs1 = cat.slots_of(ctx.shift_vec(x, 1))
                positions = cat.hom_basis_elements(yslots, xs1)
                hs = list(_projective_hom_elements(cat, yslots, xs1, positions)) if positions \
                    else [cat.morphism_from_coeffs(yslots, xs1, [], [])]
                for h in hs:
                    e = ctx.shift_vec(ctx.cone_vec(h), -1)
                    # test e in Sigma^i<S> * <S>
                    r = descent_residual(ctx, shifted_ids, e).residual
                    r = descent_residual(ctx, list(ids), r).residual
                    if r.any():
                        return False
    return True
