"""Label matching between engine indecomposables and the worked examples'
figure labels, established by AR-quiver adjacency (never by raw index).
"""
from __future__ import annotations

from typing import Dict, List, Optional, Tuple

import numpy as np

from . import smcore
from .homchain import Stalk
from .orbit import CategorySnapshot


def mesh_coord(n: int, s: Stalk) -> Tuple[int, int]:
    """Coordinates in the translation quiver ZA_n (display and matching only;
    all category data comes from the engine)."""
    i, j = n - s.b, s.b - s.a + 1
    k = s.shift
    while k > 0:
        i, j = i + j, n + 1 - j
        k -= 1
    while k < 0:
        i, j = i - (n + 1 - j), n + 1 - j
        k += 1
    return (i, j)


def coord_table(cat: CategorySnapshot, window: int = 5) -> Dict[Tuple[int, int], int]:
    out: Dict[Tuple[int, int], int] = {}
    for o in cat.indecs:
        for k in range(-window, window + 1):
            out[mesh_coord(cat.n, cat.f_obj(o.rep, k))] = o.id
    return out


def match_example_71(cat: CategorySnapshot) -> Optional[Dict[str, int]]:
    """Figure labels of the A_5, w = 2 example: positions are relative to
    s_1; the anchor translate is scanned until the configuration checks."""
    if (cat.n, cat.w) != (5, 2):
        return None
    labels = {"s1": (1, 3), "s2": (4, 1), "x": (8, 1), "y": (8, 5), "t": (5, 1),
              "zf": (2, 5), "xsh1": (3, 4), "cf": (2, 2), "sx": (9, 5)}
    coords = coord_table(cat)
    ctx = smcore.AmbientContext(cat)
    for delta in range(0, 16):
        try:
            ids = {k: coords[(i + delta, j)] for k, (i, j) in labels.items()}
        except KeyError:
            continue
        S = sorted({ids["s1"], ids["s2"]})
        if len(S) != 2:
            continue
        ok, _ = smcore.is_w_orthogonal(ctx, S, 2)
        if not ok:
            continue
        if len(smcore.perp(ctx, S, "right", 2)) != 9:
            continue
        if cat.hom_dim_ids(ids["x"], ids["y"]) != 1:
            continue
        return ids
    return None


def match_example_72(cat: CategorySnapshot) -> List[Dict[int, int]]:
    """All labelings of the A_3, w = 1 example derived from AR adjacency:
    x_1 = anchor, x_2 its unique successor, x_4 = tau^{-1} x_1, and so on
    around the quiver."""
    if (cat.n, cat.w) != (3, 1):
        return []
    arrows = cat.irreducible_arrows()
    succ = {x: sorted(y for (a, y), m in arrows.items() if a == x) for x in range(cat.N)}
    tau_inv = cat.perm_tau_inv
    out = []
    for anchor in range(cat.N):
        if len(succ[anchor]) != 1:
            continue
        lab: Dict[int, int] = {1: anchor, 2: succ[anchor][0], 4: int(tau_inv[anchor])}
        rest = [t for t in succ[lab[2]] if t != lab[4]]
        if len(rest) != 1:
            continue
        lab[3] = rest[0]
        lab[5] = int(tau_inv[lab[2]])
        lab[6] = int(tau_inv[lab[3]])
        lab[7] = int(tau_inv[lab[4]])
        lab[8] = int(tau_inv[lab[5]])
        lab[9] = int(tau_inv[lab[6]])
        if len(set(lab.values())) == 9:
            out.append(lab)
    return out
