"""Independent oracle computations frozen into the Rust test suite.

Everything here is computed from the emitted rule data files with plain
numpy so the Rust implementation can be checked against values that were
not produced by the code under test.
"""

import json
import math
from pathlib import Path

import numpy as np

DATA = Path(__file__).resolve().parent.parent / "crates" / "tilepack" / "data"
RULES = ["pinwheel", "chair", "domino", "sphinx", "penrose"]


def load(name):
    return json.loads((DATA / f"{name}.json").read_text())


def poly_area_centroid(pts):
    pts = np.asarray(pts, dtype=float)
    x, y = pts[:, 0], pts[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cross = x * yn - xn * y
    a = cross.sum() / 2.0
    cx = ((x + xn) * cross).sum() / (6 * a)
    cy = ((y + yn) * cross).sum() / (6 * a)
    return a, np.array([cx, cy])


def regular_ngon(n):
    pts = [0j]
    for k in range(n - 1):
        pts.append(pts[-1] + np.exp(2j * np.pi * k / n))
    return np.array([[z.real, z.imag] for z in pts])


def svals(l):
    e = (l[0, 0] + l[1, 1]) / 2
    f = (l[0, 0] - l[1, 1]) / 2
    g = (l[1, 0] + l[0, 1]) / 2
    h = (l[1, 0] - l[0, 1]) / 2
    return math.hypot(e, h) + math.hypot(f, g), abs(math.hypot(e, h) - math.hypot(f, g))


def kappa_prototile(corners):
    corners = np.asarray(corners, dtype=float)
    n = len(corners)
    _, c = poly_area_centroid(corners)
    tgt = regular_ngon(n)
    _, tc = poly_area_centroid(tgt)
    worst = 0.0
    for i in range(n):
        s1, s2 = corners[i] - c, corners[(i + 1) % n] - c
        t1, t2 = tgt[i] - tc, tgt[(i + 1) % n] - tc
        l = np.column_stack([t1, t2]) @ np.linalg.inv(np.column_stack([s1, s2]))
        smax, smin = svals(l)
        worst = max(worst, smax / smin)
    return worst


def kappa_report():
    print("== kappa (centroid fan, unit-side regular n-gon target) ==")
    for name in RULES:
        doc = load(name)
        per = [kappa_prototile(p["combinatorial_corners"]) for p in doc["prototiles"]]
        overall = max(per)
        labels = [p["label"] for p in doc["prototiles"]]
        per_s = ", ".join(f"{l}={k:.12f}" for l, k in zip(labels, per))
        print(f"  {name}: kappa={overall:.12f}  [{per_s}]")
    sq = [[0, 0], [1, 0], [1, 1], [0, 1]]
    print(f"  unit-square fixture: kappa={kappa_prototile(sq):.12f}")


def apply_map(m, z):
    a = complex(*m["factor"])
    b = complex(*m["offset"])
    return a * z + b


def compose(outer, inner):
    ao, bo = complex(*outer["factor"]), complex(*outer["offset"])
    ai, bi = complex(*inner["factor"]), complex(*inner["offset"])
    return {"factor": [(ao * ai).real, (ao * ai).imag], "offset": [(ao * bi + bo).real, (ao * bi + bo).imag]}


IDENT = {"factor": [1.0, 0.0], "offset": [0.0, 0.0]}


def expand(doc, proto, depth):
    tiles = [(proto, IDENT, ())]
    for _ in range(depth):
        nxt = []
        for (p, m, path) in tiles:
            for ci, ch in enumerate(doc["children"][p]):
                nxt.append((ch["prototile"], compose(m, ch), path + (ci,)))
        tiles = nxt
    return tiles


def weld_table():
    print("== weld oracle: V,E,F and boundary/interior edges (tau^1, tau^2 of prototile 0) ==")
    for name in RULES:
        doc = load(name)
        for depth in (1, 2):
            tiles = expand(doc, 0, depth)
            verts = {}
            def vid(z):
                key = (round(z.real, 7), round(z.imag, 7))
                return verts.setdefault(key, len(verts))
            edges = {}
            for (p, m, _) in tiles:
                cs = [apply_map(m, complex(*c)) for c in doc["prototiles"][p]["combinatorial_corners"]]
                ids = [vid(z) for z in cs]
                for i in range(len(ids)):
                    e = tuple(sorted((ids[i], ids[(i + 1) % len(ids)])))
                    edges[e] = edges.get(e, 0) + 1
            v, e, f = len(verts), len(edges), len(tiles)
            bnd = sum(1 for c in edges.values() if c == 1)
            inter = sum(1 for c in edges.values() if c == 2)
            assert bnd + inter == e and max(edges.values()) <= 2
            print(f"  {name} tau^{depth}: V={v} E={e} F={f} euler={v - e + f} boundary={bnd} interior={inter}")


def seg_dist(p, a, b):
    ab = b - a
    t = np.clip(np.dot(p - a, ab) / np.dot(ab, ab), 0, 1)
    return float(np.linalg.norm(p - (a + t * ab)))


def poly_boundary_dist(p, poly):
    return min(seg_dist(p, poly[i], poly[(i + 1) % len(poly)]) for i in range(len(poly)))


def buffered_root():
    print("== buffered root selection (b=2, centroid distance to host boundary, lex ties) ==")
    for name in RULES:
        doc = load(name)
        host = np.asarray(doc["prototiles"][0]["vertices"], dtype=float)
        best = None
        for (p, m, path) in expand(doc, 0, 2):
            pts = [apply_map(m, complex(*v)) for v in doc["prototiles"][p]["vertices"]]
            _, c = poly_area_centroid([[z.real, z.imag] for z in pts])
            d = poly_boundary_dist(c, host)
            if best is None or d > best[0] + 1e-12:
                best = (d, path, p)
        print(f"  {name}: path={best[1]} prototile={best[2]} dist={best[0]:.9f}")


def hausdorff_brute(pa, pb, step=1e-4):
    def sample(poly):
        out = []
        for i in range(len(poly)):
            a, b = np.array(poly[i]), np.array(poly[(i + 1) % len(poly)])
            n = max(2, int(np.ceil(np.linalg.norm(b - a) / step)))
            for t in np.linspace(0, 1, n, endpoint=False):
                out.append(a + t * (b - a))
        return np.array(out)

    def directed(ps, poly):
        return max(poly_boundary_dist(p, [np.array(q) for q in poly]) for p in ps)

    return max(directed(sample(pa), pb), directed(sample(pb), pa))


def hausdorff_report():
    print("== hausdorff oracle ==")
    sq = [[0, 0], [1, 0], [1, 1], [0, 1]]
    sh = [[0.3, 0], [1.3, 0], [1.3, 1], [0.3, 1]]
    dbl = [[0, 0], [2, 0], [2, 2], [0, 2]]
    print(f"  square vs +0.3 shift: {hausdorff_brute(sq, sh, 1e-3):.6f} (expect 0.3)")
    print(f"  square vs x2 square:  {hausdorff_brute(sq, dbl, 1e-3):.6f} (expect sqrt2={math.sqrt(2):.6f})")


def counts_report():
    print("== subdivision tile counts ==")
    for name in RULES:
        doc = load(name)
        q = len(doc["prototiles"])
        m = np.zeros((q, q), dtype=int)
        for i in range(q):
            for ch in doc["children"][i]:
                m[i][ch["prototile"]] += 1
        counts = [len(expand(doc, 0, d)) for d in range(5)]
        print(f"  {name}: M={m.tolist()} counts(tau^0..4 of proto 0)={counts}")


if __name__ == "__main__":
    kappa_report()
    weld_table()
    buffered_root()
    hausdorff_report()
    counts_report()
