"""Exhaustive enumeration of w-orthogonal collections and w-simple-minded
systems, and the reduction bijection check.

The search is a DFS over canonically ordered indecomposables with pairwise
w-orthogonality pruning; every node is tested with the Riedtmann criterion
and, in audit mode, cross-checked against the generation condition.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

import numpy as np

from . import reduction, smcore
from .orbit import CategorySnapshot, OrbitError
from .smcore import AmbientContext


@dataclass
class EnumerationReport:
    snapshot: Tuple[int, int, int]  # (rank, w-weight, prime)
    w: int
    orthogonal_count: int
    riedtmann: List[Tuple[int, ...]]
    sms: List[Tuple[int, ...]]
    seconds: float
    seed: Optional[int] = None
    audited: bool = False

    def as_dict(self) -> Dict:
        # timing is deliberately excluded: artifacts must be byte-stable
        return {
            "snapshot": list(self.snapshot),
            "w": self.w,
            "orthogonal_count": self.orthogonal_count,
            "riedtmann": [list(s) for s in self.riedtmann],
            "sms": [list(s) for s in self.sms],
            "seed": self.seed,
            "audited": self.audited,
        }


GUARDRAIL = 60


def _pair_ok(ctx, w: int, x: int, y: int) -> bool:
    cat = ctx.cat
    vx, vy = cat.vec_of([x]), cat.vec_of([y])
    if ctx.hom_dim(vx, vy) or ctx.hom_dim(vy, vx):
        return False
    for k in range(1, w):
        if ctx.hom_dim(ctx.shift_vec(vx, k), vy) or ctx.hom_dim(ctx.shift_vec(vy, k), vx):
            return False
    return True


def _single_ok(ctx, w: int, x: int) -> bool:
    cat = ctx.cat
    vx = cat.vec_of([x])
    if ctx.hom_dim(vx, vx) != 1:
        return False
    for k in range(1, w):
        if ctx.hom_dim(ctx.shift_vec(vx, k), vx):
            return False
    return True


def orthogonal_collections(ctx, w: int, force: bool = False,
                           contains: Sequence[int] = ()) -> List[Tuple[int, ...]]:
    """All w-orthogonal collections (DFS with pairwise pruning), optionally
    constrained to contain a fixed collection."""
    inds = sorted(ctx.inds)
    if len(inds) > GUARDRAIL and not force:
        raise OrbitError(f"refusing to enumerate over {len(inds)} indecomposables "
                         "(use force)")
    base = tuple(sorted(set(contains)))
    singles = {x for x in inds if _single_ok(ctx, w, x)}
    for b in base:
        if b not in singles:
            return []
    pair_cache: Dict[Tuple[int, int], bool] = {}

    def pair(x, y):
        key = (min(x, y), max(x, y))
        if key not in pair_cache:
            pair_cache[key] = _pair_ok(ctx, w, key[0], key[1])
        return pair_cache[key]

    for i, b1 in enumerate(base):
        for b2 in base[i + 1:]:
            if not pair(b1, b2):
                return []
    out: List[Tuple[int, ...]] = []
    free = [x for x in inds if x in singles and x not in base]

    def dfs(chosen: List[int], start: int):
        out.append(tuple(sorted(base + tuple(chosen))))
        for k in range(start, len(free)):
            x = free[k]
            if all(pair(x, y) for y in chosen) and all(pair(x, b) for b in base):
                chosen.append(x)
                dfs(chosen, k + 1)
                chosen.pop()

    dfs([], 0)
    if not base:
        out = [s for s in out if s]
    return sorted(set(out))


def enumerate_sms(ctx, w: int, force: bool = False, audit: bool = True,
                  contains: Sequence[int] = ()) -> EnumerationReport:
    t0 = time.monotonic()
    cat = ctx.cat
    orth = orthogonal_collections(ctx, w, force=force, contains=contains)
    ried: List[Tuple[int, ...]] = []
    sms: List[Tuple[int, ...]] = []
    for S in orth:
        if not S:
            continue
        ok, _ = smcore.riedtmann_check(ctx, S, w)
        if ok:
            ried.append(S)
            if audit:
                if not smcore.is_w_sms(ctx, S, w):
                    raise OrbitError(f"Riedtmann configuration {S} fails the "
                                     "generation condition")
                sms.append(S)
            else:
                sms.append(S)
    return EnumerationReport(
        snapshot=(cat.n, cat.w, cat.p),
        w=w, orthogonal_count=len(orth), riedtmann=sorted(ried), sms=sorted(sms),
        seconds=time.monotonic() - t0, audited=audit)


@dataclass
class BijectionReport:
    S: Tuple[int, ...]
    w: int
    upstairs: List[Tuple[int, ...]]  # sms of D containing S
    downstairs: List[Tuple[int, ...]]  # sms of Z
    matched: bool

    def as_dict(self) -> Dict:
        return {
            "S": list(self.S),
            "w": self.w,
            "sms_in_D_containing_S": [list(t) for t in self.upstairs],
            "sms_in_Z": [list(t) for t in self.downstairs],
            "matched": self.matched,
        }


def verify_bijection(cat: CategorySnapshot, S: Iterable[int], w: int,
                     force: bool = False) -> BijectionReport:
    """T <-> T minus S between sms of D containing S and sms of the
    reduction Z, checked element by element in both directions."""
    ctx = AmbientContext(cat)
    Sids = smcore.collection_ok(cat, S)
    if Sids:
        R = reduction.reduce_category(cat, Sids, w)
        zctx = R.zctx
    else:
        R = None
        zctx = ctx
    up = [t for t in enumerate_sms(ctx, w, force=force, contains=Sids).sms
          if set(Sids) <= set(t)]
    down = enumerate_sms(zctx, w, force=force).sms
    down_set = {tuple(sorted(t)) for t in down}
    up_set = {tuple(sorted(t)) for t in up}
    ok = True
    for t in up:
        r = tuple(sorted(set(t) - set(Sids)))
        if r not in down_set:
            ok = False
            break
        if tuple(sorted(set(r) | set(Sids))) != t:
            ok = False
            break
    if ok:
        for r in down:
            t = tuple(sorted(set(r) | set(Sids)))
            if t not in up_set:
                ok = False
                break
    ok = ok and len(up) == len(down)
    return BijectionReport(Sids, w, sorted(up), sorted(down), ok)
