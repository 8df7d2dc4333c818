"""Interval modules over the linearly oriented A_n quiver (1 -> 2 -> ... -> n).

Everything is derived from explicit vertex-wise linear algebra over F_p:
Hom spaces are solved from the commuting-square equations, projective
resolutions from honest kernels, decompositions from rank data.  Closed-form
interval tables only appear in tests as oracle fixtures.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import fp


@dataclass(frozen=True, order=True)
class Interval:
    """Indecomposable kA_n-module M[a,b], supported on vertices a..b."""

    a: int
    b: int
    n: int

    def __post_init__(self):
        if not (1 <= self.a <= self.b <= self.n):
            raise ValueError(f"bad interval [{self.a},{self.b}] for rank {self.n}")

    def supported(self, v: int) -> bool:
        return self.a <= v <= self.b


def projective(i: int, n: int) -> Interval:
    """P_i has a basis of paths out of i, i.e. support [i, n]."""
    return Interval(i, n, n)


def injective(i: int, n: int) -> Interval:
    return Interval(1, i, n)


class Rep:
    """A representation: per-vertex dimensions and arrow matrices over F_p.

    maps[v] is the matrix of V_{v+1} <- V_v for the arrow v -> v+1
    (0-indexed internally: maps[k] : dims[k] -> dims[k+1]).
    """

    def __init__(self, dims: Sequence[int], maps: Sequence[np.ndarray], p: int):
        self.n = len(dims)
        self.dims = list(int(d) for d in dims)
        self.p = p
        self.maps = [np.asarray(m, dtype=np.int64) % p for m in maps]
        if len(self.maps) != self.n - 1:
            raise fp.DimensionError("need n-1 arrow maps")
        for k, m in enumerate(self.maps):
            if m.shape != (self.dims[k + 1], self.dims[k]):
                raise fp.DimensionError(f"arrow {k} has shape {m.shape}")

    @classmethod
    def of_intervals(cls, ivs: Sequence[Interval], n: int, p: int) -> "Rep":
        dims = [sum(1 for iv in ivs if iv.supported(v)) for v in range(1, n + 1)]
        maps = []
        for v in range(1, n):
            m = np.zeros((dims[v], dims[v - 1]), dtype=np.int64)
            row = 0
            rows = [i for i, iv in enumerate(ivs) if iv.supported(v + 1)]
            cols = [i for i, iv in enumerate(ivs) if iv.supported(v)]
            for r, i in enumerate(rows):
                if i in cols:
                    m[r, cols.index(i)] = 1
            maps.append(m)
        return cls(dims, maps, p)

    def composite(self, a: int, b: int) -> np.ndarray:
        """Matrix of the composite V_a -> V_b along arrows, 1 <= a <= b <= n."""
        m = np.eye(self.dims[a - 1], dtype=np.int64)
        for v in range(a, b):
            m = (self.maps[v - 1] @ m) % self.p
        return m

    def total_dim(self) -> int:
        return sum(self.dims)


def rep_decompose(rep: Rep) -> Counter:
    """Interval multiplicities of a representation, from rank data only."""
    n, p = rep.n, rep.p

    def r(a: int, b: int) -> int:
        if a < 1 or b > n or a > b:
            return 0
        return fp.rank(rep.composite(a, b), p)

    out: Counter = Counter()
    for a in range(1, n + 1):
        for b in range(a, n + 1):
            m = r(a, b) - r(a - 1, b) - r(a, b + 1) + r(a - 1, b + 1)
            if m < 0:
                raise ArithmeticError("negative multiplicity: not a valid rep")
            if m:
                out[Interval(a, b, n)] = m
    if sum((iv.b - iv.a + 1) * k for iv, k in out.items()) != rep.total_dim():
        raise ArithmeticError("decomposition does not account for all dimensions")
    return out


class ModuleMap:
    """A map between direct sums of intervals, as per-vertex blocks."""

    def __init__(self, source: Sequence[Interval], target: Sequence[Interval],
                 blocks: Sequence[np.ndarray], n: int, p: int, check: bool = True):
        self.source = list(source)
        self.target = list(target)
        self.n = n
        self.p = p
        self.src_rep = Rep.of_intervals(self.source, n, p)
        self.tgt_rep = Rep.of_intervals(self.target, n, p)
        self.blocks = [np.asarray(b, dtype=np.int64) % p for b in blocks]
        for v in range(1, n + 1):
            if self.blocks[v - 1].shape != (self.tgt_rep.dims[v - 1], self.src_rep.dims[v - 1]):
                raise fp.DimensionError(f"block at vertex {v} has wrong shape")
        if check and not self.commutes():
            raise ValueError("blocks do not commute with the arrow action")

    def commutes(self) -> bool:
        for v in range(1, self.n):
            lhs = (self.blocks[v] @ self.src_rep.maps[v - 1]) % self.p
            rhs = (self.tgt_rep.maps[v - 1] @ self.blocks[v - 1]) % self.p
            if not np.array_equal(lhs, rhs):
                return False
        return True

    def is_zero(self) -> bool:
        return all(not b.any() for b in self.blocks)


def canonical_hom(x: Interval, y: Interval, p: int) -> Optional[ModuleMap]:
    """The canonical generator of Hom(M[x], M[y]) found by solving the
    commuting equations; None when the space is zero.

    Unknowns are the per-vertex 1x1 entries on the common support; the
    solution space is at most one-dimensional and the generator is
    normalized to have all nonzero entries equal to 1.
    """
    if x.n != y.n:
        raise fp.DimensionError("mixed ranks")
    n = x.n
    common = [v for v in range(1, n + 1) if x.supported(v) and y.supported(v)]
    if not common:
        return None
    idx = {v: i for i, v in enumerate(common)}
    rows = []
    for v in range(1, n):
        # f_{v+1} * xarr_v - yarr_v * f_v = 0 ; absent factors are 0
        row = np.zeros(len(common), dtype=np.int64)
        xarr = 1 if (x.supported(v) and x.supported(v + 1)) else 0
        yarr = 1 if (y.supported(v) and y.supported(v + 1)) else 0
        if (v + 1) in idx and xarr:
            row[idx[v + 1]] += 1
        if v in idx and yarr:
            row[idx[v]] -= 1
        if row.any():
            rows.append(row)
    if rows:
        ker = fp.kernel_basis(np.stack(rows), p)
    else:
        ker = np.eye(len(common), dtype=np.int64)
    if ker.shape[1] == 0:
        return None
    if ker.shape[1] > 1:
        raise ArithmeticError("interval Hom space has dimension > 1")
    vec = ker[:, 0] % p
    nz = vec[vec != 0]
    if nz.size == 0:
        return None
    scale = fp.inv_mod(int(nz[0]), p)
    vec = (vec * scale) % p
    if not all(int(t) == 1 for t in vec if t):
        raise ArithmeticError("generator not normalizable to all-ones")
    blocks = []
    for v in range(1, n + 1):
        if v in idx and vec[idx[v]]:
            blocks.append(np.array([[1]], dtype=np.int64))
        else:
            blocks.append(np.zeros((1 if y.supported(v) else 0, 1 if x.supported(v) else 0),
                                   dtype=np.int64))
    return ModuleMap([x], [y], blocks, n, p)


def hom_basis(x: Interval, y: Interval, p: int = 101) -> List[ModuleMap]:
    m = canonical_hom(x, y, p)
    return [m] if m is not None else []


def hom_dim(x: Interval, y: Interval, p: int = 101) -> int:
    return len(hom_basis(x, y, p))


def kernel_rep(f: ModuleMap) -> Tuple[Rep, List[np.ndarray]]:
    """Kernel of f as a Rep plus inclusion matrices per vertex."""
    n, p = f.n, f.p
    bases = [fp.kernel_basis(f.blocks[v], p) for v in range(n)]
    dims = [b.shape[1] for b in bases]
    maps = []
    for v in range(n - 1):
        img = (f.src_rep.maps[v] @ bases[v]) % p
        m = np.zeros((dims[v + 1], dims[v]), dtype=np.int64)
        for j in range(dims[v]):
            sol = fp.solve(bases[v + 1], img[:, j], p)
            if sol is None:
                raise ArithmeticError("kernel not arrow-stable")
            m[:, j] = sol
        maps.append(m)
    return Rep(dims, maps, p), bases


def cokernel_rep(f: ModuleMap) -> Tuple[Rep, List[np.ndarray]]:
    """Cokernel of f as a Rep plus projection matrices per vertex."""
    n, p = f.n, f.p
    projs = []
    dims = []
    for v in range(n):
        blk = f.blocks[v]
        tdim = f.tgt_rep.dims[v]
        # choose a complement to im(f_v): columns of blk span the image
        _, pcols = fp.rref(blk, p) if blk.size else (np.zeros((tdim, 0)), [])
        img = blk[:, pcols] if blk.size else np.zeros((tdim, 0), dtype=np.int64)
        ext = img.copy()
        comp_idx = []
        for e in range(tdim):
            cand = np.zeros((tdim, 1), dtype=np.int64)
            cand[e, 0] = 1
            trial = np.concatenate([ext, cand], axis=1)
            if fp.rank(trial, p) > ext.shape[1]:
                ext = trial
                comp_idx.append(e)
        # full basis E = [img | e_comp]; quotient coords = last block of E^{-1}
        if tdim:
            full = ext
            inv = _inv_mod_matrix(full, p)
            proj = inv[img.shape[1]:, :]
        else:
            proj = np.zeros((0, 0), dtype=np.int64)
        projs.append(proj)
        dims.append(proj.shape[0])
    maps = []
    for v in range(n - 1):
        # section: proj has a right inverse given by the chosen complement cols
        sec = _right_inverse(projs[v], p)
        m = (projs[v + 1] @ f.tgt_rep.maps[v] @ sec) % p
        maps.append(m)
    return Rep(dims, maps, p), projs


def _inv_mod_matrix(a: np.ndarray, p: int) -> np.ndarray:
    m = a.shape[0]
    aug = np.concatenate([a % p, np.eye(m, dtype=np.int64)], axis=1)
    R, pivots = fp.rref(aug, p)
    if pivots[:m] != list(range(m)):
        raise ArithmeticError("matrix not invertible")
    return R[:, m:]


def _right_inverse(a: np.ndarray, p: int) -> np.ndarray:
    rows, cols = a.shape
    out = np.zeros((cols, rows), dtype=np.int64)
    for j in range(rows):
        e = np.zeros(rows, dtype=np.int64)
        e[j] = 1
        sol = fp.solve(a, e, p)
        if sol is None:
            raise ArithmeticError("no right inverse")
        out[:, j] = sol
    return out


def kernel_decomposition(f: ModuleMap) -> Counter:
    return rep_decompose(kernel_rep(f)[0])


def cokernel_decomposition(f: ModuleMap) -> Counter:
    return rep_decompose(cokernel_rep(f)[0])


def projective_resolution(x: Interval, p: int = 101) -> Tuple[List[Interval], List[Interval], Counter]:
    """0 -> P1 -> P0 -> M[x] -> 0 with interval projectives.

    Returns (P1 summands, P0 summands, homology-check data).  The kernel is
    computed from the canonical surjection, not read off a table.
    """
    n = x.n
    p0 = projective(x.a, n)
    surj = canonical_hom(p0, x, p)
    if surj is None:
        raise ArithmeticError("no canonical surjection from the projective cover")
    ker = kernel_decomposition(surj)
    p1 = []
    for iv, k in sorted(ker.items()):
        p1.extend([iv] * k)
    for iv in p1:
        if iv.b != n:
            raise ArithmeticError("kernel of projective cover is not projective")
    return p1, [p0], ker


def ext1_dim(x: Interval, y: Interval, p: int = 101) -> int:
    """dim Ext^1(M[x], M[y]) = dim coker(Hom(P0,y) -> Hom(P1,y))."""
    p1, (p0,), _ = projective_resolution(x, p)
    hom_p0 = hom_dim(p0, y, p)
    if not p1:
        return 0
    hom_p1 = sum(hom_dim(q, y, p) for q in p1)
    # the connecting map precomposes with P1 -> P0; Hom(P0,y) is at most
    # 1-dimensional so its image rank is 0 or 1
    rk = 0
    if hom_p0:
        g = canonical_hom(p0, y, p)
        for q in p1:
            d = canonical_hom(q, p0, p)
            if d is not None and not _compose_maps(g, d).is_zero():
                rk = 1
                break
    return hom_p1 - min(rk, hom_p1)


def ext1_basis(x: Interval, y: Interval, p: int = 101) -> List[Tuple[Interval, Interval]]:
    """Extension classes Hom(x, Sigma y); encoded by the resolution corner
    (P1 summand, y) carrying the canonical representative."""
    d = ext1_dim(x, y, p)
    if d == 0:
        return []
    if d > 1:
        raise ArithmeticError("interval Ext space has dimension > 1")
    p1, _, _ = projective_resolution(x, p)
    return [(p1[0], y)]


def _compose_maps(g: ModuleMap, f: ModuleMap) -> ModuleMap:
    if g.n != f.n or g.p != f.p:
        raise fp.DimensionError("mixed context")
    blocks = [(g.blocks[v] @ f.blocks[v]) % f.p for v in range(f.n)]
    return ModuleMap(f.source, g.target, blocks, f.n, f.p)


def compose(g: ModuleMap, f: ModuleMap) -> ModuleMap:
    return _compose_maps(g, f)


def homology_of_map(f: ModuleMap) -> Dict[str, Counter]:
    """Kernel and cokernel interval decompositions of a single map."""
    return {"ker": kernel_decomposition(f), "coker": cokernel_decomposition(f)}


def euler_form(dx: Sequence[int], dy: Sequence[int]) -> int:
    """Euler form of dimension vectors for linearly oriented A_n."""
    n = len(dx)
    return sum(dx[v] * dy[v] for v in range(n)) - sum(dx[v] * dy[v + 1] for v in range(n - 1))
