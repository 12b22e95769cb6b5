#!/usr/bin/env python3
"""Generate the built-in substitution rule data files.

Derives the child similarity maps for the five shipped rules, computes
combinatorial corner sets from same-level tile contacts, verifies the
partitions and edge matching with shapely, and writes
crates/tilepack/data/*.json.
"""

import cmath
import json
import math
from pathlib import Path

import numpy as np
from shapely.geometry import Polygon
from shapely.ops import unary_union

TOL = 1e-9
END_TOL = 1e-6

DATA_DIR = Path(__file__).resolve().parents[1] / "crates" / "tilepack" / "data"


def clean(z):
    re = 0.0 if abs(z.real) < 1e-14 else z.real
    im = 0.0 if abs(z.imag) < 1e-14 else z.imag
    return complex(re, im)


class Rule:
    def __init__(self, name, labels, polys, children):
        self.name = name
        self.labels = labels
        self.polys = [[clean(complex(v)) for v in p] for p in polys]
        self.children = [
            [(t, clean(complex(a)), clean(complex(b))) for (t, a, b) in ch]
            for ch in children
        ]
        self.corners = None

    def expand(self, tid, depth):
        tiles = [(tid, 1 + 0j, 0j)]
        for _ in range(depth):
            tiles = [
                (u, a * ca, a * cb + b)
                for (t, a, b) in tiles
                for (u, ca, cb) in self.children[t]
            ]
        return tiles


def mirrored_children(children, flip, c_parent, c_of):
    # conjugate of f composed with the mirror isometries of parent and child
    out = []
    for (t, a, b) in children:
        ac = a.conjugate()
        out.append((flip[t], ac, c_parent - c_of[t] * ac - b.conjugate()))
    return out


def make_pinwheel():
    p2 = [0, 2, 1j]
    p1 = [0, 2, 2 + 1j]
    ch_p1 = [
        (0, -(2 + 1j) / 5, (4 + 2j) / 5),
        (0, (1 - 2j) / 5, (8 + 4j) / 5),
        (0, -(2 + 1j) / 5, (9 + 2j) / 5),
        (1, -(2 + 1j) / 5, (8 + 4j) / 5),
        (1, (2 + 1j) / 5, 1),
    ]
    ch_p2 = mirrored_children(ch_p1, {0: 1, 1: 0}, 2.0, {0: 2.0, 1: 2.0})
    return Rule("pinwheel", ["p2", "p1"], [p2, p1], [ch_p2, ch_p1])


def make_chair():
    poly = [0, 2, 2 + 1j, 1 + 1j, 1 + 2j, 2j]
    ch = [
        (0, 0.5, 0),
        (0, 0.5j, 2),
        (0, -0.5j, 2j),
        (0, 0.5, 0.5 + 0.5j),
    ]
    return Rule("chair", ["chair"], [poly], [ch])


def make_domino():
    poly = [0, 2, 2 + 1j, 1j]
    ch = [
        (0, 0.5j, 0.5),
        (0, 0.5j, 1),
        (0, 0.5, 1),
        (0, 0.5, 1 + 0.5j),
    ]
    return Rule("domino", ["domino"], [poly], [ch])


def make_penrose():
    # Robinson triangles for the kite and dart tiling: half-kite hk is the
    # 36-72-72 triangle (0, 1, phi*w), half-dart hd the 36-36-108 triangle
    # (0, phi, u). A deflated kite is the ace: two kites plus a dart whose
    # tail sits at the apex; a deflated dart carries a kite over its axis.
    phi = (1 + math.sqrt(5)) / 2
    w = cmath.exp(2j * math.pi / 5)
    u = cmath.exp(1j * math.pi / 5)
    a = phi * w
    q = (w + 1) / phi
    hk = [0, 1, a]
    hd = [0, phi, u]
    ch_hkl = [
        (1, q - 1, 1),
        (0, w - q, q),
        (3, (a - q) / phi, q),
    ]
    ch_hdl = [
        (1, u - 1, 1),
        (2, (u - phi) / phi, phi),
    ]
    flip = {0: 1, 1: 0, 2: 3, 3: 2}
    c_of = {0: 1.0, 1: 1.0, 2: phi, 3: phi}
    ch_hkr = mirrored_children(ch_hkl, flip, 1.0, c_of)
    ch_hdr = mirrored_children(ch_hdl, flip, phi, c_of)
    return Rule(
        "penrose",
        ["hkL", "hkR", "hdL", "hdR"],
        [hk, hk, hd, hd],
        [ch_hkl, ch_hkr, ch_hdl, ch_hdr],
    )


# Sphinx: search for the scale-1/2 dissection on the triangular lattice.
# Cells are (kind, a, b) with kind 0 = up, 1 = down; centers are stored in
# tripled barycentric coordinates so every transform stays integral.

SPHINX_CELLS = [(0, 0, 0), (1, 0, 0), (0, 1, 0), (1, 1, 0), (0, 2, 0), (0, 0, 1)]


def cell_center(kind, a, b):
    return (3 * a + 1, 3 * b + 1) if kind == 0 else (3 * a + 2, 3 * b + 2)


def double_cells(cells):
    out = []
    for (k, a, b) in cells:
        if k == 0:
            out += [(0, 2 * a, 2 * b), (0, 2 * a + 1, 2 * b), (1, 2 * a, 2 * b), (0, 2 * a, 2 * b + 1)]
        else:
            out += [(1, 2 * a + 1, 2 * b), (1, 2 * a, 2 * b + 1), (1, 2 * a + 1, 2 * b + 1), (0, 2 * a + 1, 2 * b + 1)]
    return out


def rot_c(c):
    u, v = c
    return (-v, u + v)


def mir_c(c):
    u, v = c
    return (u + v, -v)


def lat(s, t):
    return s + t * cmath.exp(1j * math.pi / 3)


def sphinx_placements(parent):
    base = [cell_center(*c) for c in SPHINX_CELLS]
    us = [u for u, v in parent]
    vs = [v for u, v in parent]
    seen = {}
    for eps in (0, 1):
        img0 = [mir_c(c) for c in base] if eps else list(base)
        for k in range(6):
            img = img0
            for _ in range(k):
                img = [rot_c(c) for c in img]
            ius = [u for u, v in img]
            ivs = [v for u, v in img]
            for du in range(min(us) - max(ius), max(us) - min(ius) + 1):
                if du % 3:
                    continue
                for dv in range(min(vs) - max(ivs), max(vs) - min(ivs) + 1):
                    if dv % 3:
                        continue
                    cells = frozenset((u + du, v + dv) for u, v in img)
                    if cells <= parent:
                        seen[(eps, k, du, dv)] = cells
    return sorted(seen.items())


def exact_cover(parent, placements):
    sols = []

    def bt(remaining, chosen):
        if not remaining:
            sols.append(tuple(sorted(key for key, _ in chosen)))
            return
        best = None
        for c in sorted(remaining):
            cands = [p for p in placements if c in p[1] and p[1] <= remaining]
            if best is None or len(cands) < len(best):
                best = cands
            if not cands:
                return
        for p in best:
            chosen.append(p)
            bt(remaining - p[1], chosen)
            chosen.pop()

    bt(parent, [])
    return sorted(set(sols))


def make_sphinx():
    s3 = math.sqrt(3)
    sph_l = [0, 3, 2.5 + s3 / 2 * 1j, 1.5 + s3 / 2 * 1j, 1 + s3 * 1j]
    sph_r = [0, 3, 2 + s3 * 1j, 1.5 + s3 / 2 * 1j, 0.5 + s3 / 2 * 1j]

    cells_poly = unary_union([
        Polygon([c2xy(lat(a, b)), c2xy(lat(a + 1, b)), c2xy(lat(a, b + 1))]) if k == 0
        else Polygon([c2xy(lat(a + 1, b)), c2xy(lat(a + 1, b + 1)), c2xy(lat(a, b + 1))])
        for (k, a, b) in SPHINX_CELLS
    ])
    assert cells_poly.symmetric_difference(Polygon([c2xy(v) for v in sph_l])).area < TOL

    parent = frozenset(cell_center(*c) for c in double_cells(SPHINX_CELLS))
    assert len(parent) == 24
    placements = sphinx_placements(parent)
    sols = exact_cover(parent, placements)
    print(f"sphinx: {len(placements)} placements, {len(sols)} exact covers")

    rot1 = cmath.exp(1j * math.pi / 3)
    chosen = None
    for sol in sols:
        kids = []
        for (eps, k, du, dv) in sol:
            t_geo = lat(du / 3, dv / 3)
            r = rot1 ** k
            if eps == 0:
                kids.append((0, r / 2, t_geo / 2))
            else:
                kids.append((1, -r / 2, (3 * r + t_geo) / 2))
        n_l = sum(1 for (t, _, _) in kids if t == 0)
        n_r = len(kids) - n_l
        print(f"  cover {sol}: {n_l} direct + {n_r} mirrored")
        if chosen is None and n_l > 0 and n_r > 0:
            chosen = kids
    assert chosen is not None, "no cover uses both handednesses"

    ch_r = mirrored_children(chosen, {0: 1, 1: 0}, 3.0, {0: 3.0, 1: 3.0})
    return Rule("sphinx", ["sphinxL", "sphinxR"], [sph_l, sph_r], [chosen, ch_r])


def c2xy(z):
    return (z.real, z.imag)


# Combinatorial corners: a boundary point of a prototile is a corner when a
# same-level neighbor holds a vertex there in some expansion. Iterate to a
# fixed point over depth-3 expansions, then confirm depth 4 adds nothing.

def boundary_param(poly, z):
    n = len(poly)
    for i in range(n):
        u = poly[i]
        v = poly[(i + 1) % n]
        w = v - u
        l2 = (w * w.conjugate()).real
        s = ((z - u) * w.conjugate()).real / l2
        if -TOL < s < 1 + TOL:
            d = abs(z - (u + max(0.0, min(1.0, s)) * w))
            if d < 1e-7:
                return (i, max(0.0, min(1.0, s)))
    return None


def ordered_insert(rule, tid, z):
    z = clean(z)
    for c in rule.corners[tid]:
        if abs(c - z) < TOL:
            return False
    p = boundary_param(rule.polys[tid], z)
    assert p is not None, f"{rule.name}[{tid}]: corner {z} off boundary"
    keyed = []
    for c in rule.corners[tid] + [z]:
        q = boundary_param(rule.polys[tid], c)
        assert q is not None
        keyed.append((q if q[1] < 1 - TOL else ((q[0] + 1) % len(rule.polys[tid]), 0.0), c))
    keyed.sort(key=lambda kc: kc[0])
    rule.corners[tid] = [c for _, c in keyed]
    return True


def contact_pass(rule, depth):
    demands = []
    for p in range(len(rule.polys)):
        tiles = rule.expand(p, depth)
        pts = []
        owner = []
        for idx, (t, a, b) in enumerate(tiles):
            for c in rule.corners[t]:
                pts.append(a * c + b)
                owner.append(idx)
        pts = np.array(pts, dtype=complex)
        owner = np.array(owner)
        for idx, (t, a, b) in enumerate(tiles):
            poly = [a * c + b for c in rule.corners[t]]
            n = len(poly)
            for i in range(n):
                u = poly[i]
                v = poly[(i + 1) % n]
                w = v - u
                l2 = abs(w) ** 2
                s = ((pts - u) * np.conjugate(w)).real / l2
                proj = u + np.clip(s, 0.0, 1.0) * w
                d = np.abs(pts - proj)
                along = np.abs(w)
                hit = (d < TOL) & (s * along > END_TOL) & ((1 - s) * along > END_TOL) & (owner != idx)
                for z in pts[hit]:
                    demands.append((t, (z - b) / a))
    return demands


def compute_corners(rule):
    rule.corners = [list(p) for p in rule.polys]
    changed = True
    while changed:
        changed = False
        for (t, z) in contact_pass(rule, 3):
            if ordered_insert(rule, t, z):
                changed = True
    leftovers = [d for d in contact_pass(rule, 4) if ordered_insert(rule, d[0], d[1])]
    assert not leftovers, f"{rule.name}: corner set not stable at depth 4: {leftovers}"


def shapely_poly(vs):
    return Polygon([c2xy(v) for v in vs])


def verify_partition(rule, depth):
    for p in range(len(rule.polys)):
        parent = shapely_poly(rule.polys[p])
        pieces = [
            shapely_poly([a * c + b for c in rule.polys[t]])
            for (t, a, b) in rule.expand(p, depth)
        ]
        total = sum(pc.area for pc in pieces)
        union = unary_union(pieces)
        assert abs(total - parent.area) < 1e-8, (rule.name, p, depth, "area sum")
        assert union.symmetric_difference(parent).area < 1e-8, (rule.name, p, depth, "union")


def seg_overlap_is_full_edge(a, b, c, d):
    # returns None if segments are not in positive-length collinear contact,
    # else whether they coincide endpoint to endpoint
    w = b - a
    lw = abs(w)
    dir_w = w / lw
    off_c = ((c - a) / dir_w).imag
    off_d = ((d - a) / dir_w).imag
    if abs(off_c) > 1e-7 or abs(off_d) > 1e-7:
        return None
    sc = ((c - a) / dir_w).real
    sd = ((d - a) / dir_w).real
    lo, hi = min(sc, sd), max(sc, sd)
    if min(hi, lw) - max(lo, 0.0) < 1e-6:
        return None
    same = (abs(c - a) < 1e-7 and abs(d - b) < 1e-7) or (abs(c - b) < 1e-7 and abs(d - a) < 1e-7)
    return same


def verify_edge_matching(rule, depth):
    # tiles must meet along unions of whole complex edges and vertices
    for p in range(len(rule.polys)):
        tiles = rule.expand(p, depth)
        polys = []
        edges = []
        for idx, (t, a, b) in enumerate(tiles):
            cs = [a * c + b for c in rule.corners[t]]
            polys.append(shapely_poly(cs))
            n = len(cs)
            for i in range(n):
                edges.append((idx, cs[i], cs[(i + 1) % n]))
        for i in range(len(tiles)):
            for j in range(i + 1, len(tiles)):
                inter = polys[i].intersection(polys[j])
                assert inter.area < 1e-10, (rule.name, p, i, j, "overlap")
        for x in range(len(edges)):
            for y in range(x + 1, len(edges)):
                if edges[x][0] == edges[y][0]:
                    continue
                full = seg_overlap_is_full_edge(edges[x][1], edges[x][2], edges[y][1], edges[y][2])
                if full is not None:
                    assert full, (rule.name, p, "partial edge contact", edges[x], edges[y])


def incidence(rule):
    q = len(rule.polys)
    m = np.zeros((q, q), dtype=np.int64)
    for p in range(q):
        for (t, _, _) in rule.children[p]:
            m[p][t] += 1
    return m


def primitivity_exponent(rule):
    m = incidence(rule)
    power = m.copy()
    for k in range(1, len(m) ** 2 + 2):
        if (power > 0).all():
            return k
        power = power @ m
    return None


def special_configuration(rule):
    for depth in (1, 2, 3):
        for host in range(len(rule.polys)):
            tiles = rule.expand(host, depth)
            for i in range(len(tiles)):
                for j in range(i + 1, len(tiles)):
                    if tiles[i][0] != tiles[j][0]:
                        continue
                    ratio = tiles[j][1] / tiles[i][1]
                    if abs(ratio - 1) > TOL and abs(ratio + 1) > TOL:
                        return (depth, rule.labels[host], i, j, ratio)
    return None


def verify_ccw(rule):
    for p, poly in enumerate(rule.polys):
        area2 = sum(
            (poly[i].real * poly[(i + 1) % len(poly)].imag
             - poly[(i + 1) % len(poly)].real * poly[i].imag)
            for i in range(len(poly))
        )
        assert area2 > 0, (rule.name, p, "not ccw")
        assert shapely_poly(poly).is_valid, (rule.name, p, "invalid polygon")


def snap(x):
    r = round(x, 12)
    return 0.0 if r == 0 else r


def pair(z):
    return [snap(z.real), snap(z.imag)]


def emit(rule):
    DATA_DIR.mkdir(parents=True, exist_ok=True)
    doc = {
        "name": rule.name,
        "prototiles": [
            {
                "id": p,
                "label": rule.labels[p],
                "vertices": [pair(v) for v in rule.polys[p]],
                "base_edge": [0, 1],
                "combinatorial_corners": [pair(c) for c in rule.corners[p]],
            }
            for p in range(len(rule.polys))
        ],
        "children": [
            [
                {"prototile": t, "factor": pair(a), "offset": pair(b)}
                for (t, a, b) in rule.children[p]
            ]
            for p in range(len(rule.polys))
        ],
    }
    path = DATA_DIR / f"{rule.name}.json"
    path.write_text(json.dumps(doc, indent=1) + "\n")
    print(f"wrote {path}")


def report(rule):
    print(f"== {rule.name} ==")
    m = incidence(rule)
    print(f"  incidence:\n{m}")
    print(f"  primitivity exponent: {primitivity_exponent(rule)}")
    for p in range(len(rule.polys)):
        scales = sorted({round(abs(a), 12) for (_, a, _) in rule.children[p]})
        print(f"  {rule.labels[p]}: {len(rule.children[p])} children, scales {scales}")
        print(f"    corners ({len(rule.corners[p])}): {[c2xy(c) for c in rule.corners[p]]}")
    sc = special_configuration(rule)
    print(f"  special configuration: depth={sc[0]} host={sc[1]} pair=({sc[2]},{sc[3]}) ratio={sc[4]:.12g}")


def main():
    rules = [make_pinwheel(), make_chair(), make_domino(), make_sphinx(), make_penrose()]
    for rule in rules:
        verify_ccw(rule)
        compute_corners(rule)
        verify_partition(rule, 1)
        verify_partition(rule, 2)
        verify_edge_matching(rule, 1)
        verify_edge_matching(rule, 2)
        report(rule)
        emit(rule)
    print("all rules verified")


if __name__ == "__main__":
    main()
