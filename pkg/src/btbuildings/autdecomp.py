"""Combinatorial automorphism analysis: decomposition of injective
homomorphisms of products of complete graphs, label-action classification
of building automorphisms given as generator words, and the normal form
that restores a word to a pure factor exchange on the standard apartment.
"""

from itertools import product

from .building import (PolyVertex, apartment_point_of_vertex, act, act_factor,
                       basic_chamber, in_standard_apartment, involution_lambda,
                       labelling_C, labelling_D, matrix_power, shift_generator,
                       sigma_mu)
from .errors import WindowError
from .field import INF, FieldElement
from .lattice import gaussian_binomial


# ---------------------------------------------------------------------------
# product graphs and homomorphism decomposition
# ---------------------------------------------------------------------------

class ProductGraph:
    """Product of complete graphs K_{a_1} x .. x K_{a_n}: vertices are
    tuples, edges join tuples differing in exactly one coordinate."""

    def __init__(self, sizes):
        sizes = tuple(int(a) for a in sizes)
        if any(a < 1 for a in sizes):
            raise ValueError("factor sizes must be >= 1")
        self.sizes = sizes

    def vertices(self):
        return list(product(*[range(a) for a in self.sizes]))

    def adjacent(self, u, v):
        return sum(1 for x, y in zip(u, v) if x != y) == 1

    def edges(self):
        verts = self.vertices()
        return [(u, v) for i, u in enumerate(verts)
                for v in verts[i + 1:] if self.adjacent(u, v)]


class HomDecomposition:
    """mu, per-factor injective maps g_i, and constants for the output
    coordinates outside Im(mu); reconstructs the homomorphism exactly."""

    def __init__(self, sizes_in, sizes_out, mu, gs, consts):
        self.sizes_in = tuple(sizes_in)
        self.sizes_out = tuple(sizes_out)
        self.mu = tuple(mu)
        self.gs = tuple(tuple(g) for g in gs)
        self.consts = dict(consts)

    def __repr__(self):
        return (f"HomDecomposition(mu={self.mu}, gs={self.gs}, "
                f"consts={self.consts})")

    def apply(self, u):
        out = [None] * len(self.sizes_out)
        for j, c in self.consts.items():
            out[j] = c
        for i, j in enumerate(self.mu):
            out[j] = self.gs[i][u[i]]
        return tuple(out)

    def is_automorphism(self):
        return (sorted(self.sizes_in) == sorted(self.sizes_out)
                and not self.consts
                and all(len(set(g)) == self.sizes_out[j]
                        for g, j in zip(self.gs, self.mu)))


def decompose_hom(f, sizes_in, sizes_out):
    """Decompose an injective graph homomorphism f (a dict on vertex tuples)
    into (mu, g_i, constants).  Verifies injectivity and edge preservation;
    raises ValueError with a certificate edge when f is not a homomorphism."""
    G = ProductGraph(sizes_in)
    H = ProductGraph(sizes_out)
    if any(a < 2 for a in sizes_in):
        raise ValueError("input factors of size < 2 are not supported")
    verts = G.vertices()
    images = [f[u] for u in verts]
    if len(set(images)) != len(images):
        raise ValueError("not injective")
    for (u, v) in G.edges():
        if not H.adjacent(f[u], f[v]):
            raise ValueError(f"not edge-preserving: certificate edge {u} -- {v}")
    base = verts[0]
    fb = f[base]
    mu = []
    gs = []
    for i, a in enumerate(sizes_in):
        axis = None
        g = [None] * a
        g[base[i]] = None
        for t in range(a):
            if t == base[i]:
                continue
            u = base[:i] + (t,) + base[i + 1:]
            img = f[u]
            diff = [j for j in range(len(sizes_out)) if img[j] != fb[j]]
            assert len(diff) == 1  # edge preservation already verified
            if axis is None:
                axis = diff[0]
            elif axis != diff[0]:
                raise ValueError(f"not decomposable: factor {i} moves several axes")
            g[t] = img[axis]
        g[base[i]] = fb[axis]
        mu.append(axis)
        gs.append(g)
    if len(set(mu)) != len(mu):
        raise ValueError("not decomposable: mu is not injective")
    consts = {j: fb[j] for j in range(len(sizes_out)) if j not in set(mu)}
    dec = HomDecomposition(sizes_in, sizes_out, mu, gs, consts)
    for u in verts:
        if dec.apply(u) != f[u]:
            raise ValueError(f"decomposition failed to reconstruct f at {u}")
    return dec


def graph_automorphisms_bruteforce(sizes, cap=500000):
    """All automorphisms of the product graph by backtracking over vertex
    bijections preserving adjacency.  Raises WindowError beyond cap."""
    G = ProductGraph(sizes)
    verts = G.vertices()
    n = len(verts)
    index = {v: i for i, v in enumerate(verts)}
    adj = [[False] * n for _ in range(n)]
    for i, u in enumerate(verts):
        for j in range(i + 1, n):
            if G.adjacent(u, verts[j]):
                adj[i][j] = adj[j][i] = True
    out = []

    def extend(mapping, used):
        if len(out) > cap:
            raise WindowError(f"automorphism enumeration exceeded cap {cap}")
        k = len(mapping)
        if k == n:
            out.append(tuple(mapping))
            return
        for img in range(n):
            if used[img]:
                continue
            ok = True
            for prev in range(k):
                if adj[k][prev] != adj[img][mapping[prev]]:
                    ok = False
                    break
            if ok:
                mapping.append(img)
                used[img] = True
                extend(mapping, used)
                mapping.pop()
                used[img] = False

    extend([], [False] * n)
    return [{verts[i]: verts[m[i]] for i in range(n)} for m in out]


def expected_aut_order(sizes):
    """(prod a_i!) * #{sigma : a_sigma(i) = a_i}."""
    from math import factorial
    total = 1
    for a in sizes:
        total *= factorial(a)
    mult = {}
    for a in sizes:
        mult[a] = mult.get(a, 0) + 1
    for m in mult.values():
        total *= factorial(m)
    return total


# ---------------------------------------------------------------------------
# automorphism words
# ---------------------------------------------------------------------------

class AutWord:
    """Sequence of generators applied left to right: GroupElement (per-factor
    matrices), Lambda (mask), FactorExchange (mu), Shift (factor, power)."""

    def __init__(self, descriptor, gens):
        self.descriptor = descriptor
        self.gens = list(gens)
        for g in self.gens:
            kind = g["kind"]
            if kind == "group":
                if len(g["matrices"]) != descriptor.r:
                    raise ValueError("group generator factor count mismatch")
            elif kind == "lambda":
                if len(g["mask"]) != descriptor.r:
                    raise ValueError("lambda mask factor count mismatch")
            elif kind == "exchange":
                mu = g["mu"]
                if sorted(mu) != list(range(descriptor.r)):
                    raise ValueError("exchange mu is not a permutation")
                for i in range(descriptor.r):
                    if descriptor.dims[mu[i]] != descriptor.dims[i]:
                        raise ValueError("exchange does not respect dimensions")
            elif kind == "shift":
                if not 0 <= g["factor"] < descriptor.r:
                    raise ValueError("shift factor out of range")
            else:
                raise ValueError(f"unknown generator kind {kind!r}")

    def apply(self, x):
        for g in self.gens:
            kind = g["kind"]
            if kind == "group":
                x = act(g["matrices"], x)
            elif kind == "lambda":
                x = involution_lambda(x, g["mask"])
            elif kind == "exchange":
                mu = g["mu"]
                models = self.descriptor.models
                for i in range(self.descriptor.r):
                    if models[mu[i]] is not models[i]:
                        raise ValueError(
                            "exchange between different fields is only defined "
                            "on apartment points")
                x = PolyVertex(tuple(x.components[mu[i]]
                                     for i in range(self.descriptor.r)))
            elif kind == "shift":
                i, power = g["factor"], g["power"]
                model, d = self.descriptor.factors[i]
                mat = matrix_power(model, shift_generator(model, d + 1), power)
                x = x.replace(i, act_factor(mat, x.components[i]))
        return x

    def to_json_obj(self):
        out = []
        for g in self.gens:
            if g["kind"] == "group":
                mats = []
                for m, (model, d) in zip(g["matrices"], self.descriptor.factors):
                    if m is None:
                        mats.append(None)
                    else:
                        mats.append([model.elem_str(x) if isinstance(x, FieldElement)
                                     else str(x) for row in m for x in row])
                out.append({"kind": "group", "matrices": mats})
            elif g["kind"] == "lambda":
                out.append({"kind": "lambda", "mask": list(g["mask"])})
            elif g["kind"] == "exchange":
                out.append({"kind": "exchange", "mu": list(g["mu"])})
            else:
                out.append({"kind": "shift", "factor": g["factor"],
                            "power": g["power"]})
        return out

    @classmethod
    def from_json_obj(cls, descriptor, obj):
        gens = []
        for g in obj:
            if g["kind"] == "group":
                mats = []
                for flat, (model, d) in zip(g["matrices"], descriptor.factors):
                    if flat is None:
                        mats.append(None)
                        continue
                    n = d + 1
                    mats.append([[model.elem_parse(flat[i * n + j])
                                  for j in range(n)] for i in range(n)])
                gens.append({"kind": "group", "matrices": mats})
            elif g["kind"] == "lambda":
                gens.append({"kind": "lambda", "mask": list(g["mask"])})
            elif g["kind"] == "exchange":
                gens.append({"kind": "exchange", "mu": list(g["mu"])})
            else:
                gens.append({"kind": "shift", "factor": int(g["factor"]),
                             "power": int(g["power"])})
        return cls(descriptor, gens)


# ---------------------------------------------------------------------------
# label action of a word on a ball
# ---------------------------------------------------------------------------

def label_action(word, b):
    """Decomposition (mu, p_i) of C o phi o D and per-factor classification
    as rotation t -> a_i + t or reflection t -> a_i - t.  Verifies part 1
    (C o phi = C o phi o D o C on the ball) and cross-checks the rotation /
    reflection call against the neighbor-count signature; disagreement is a
    hard error."""
    descriptor = b.descriptor
    moduli = descriptor.label_moduli()
    # the label map C o phi o D on the product of complete graphs
    f = {}
    for lab in product(*[range(m) for m in moduli]):
        v = labelling_D(descriptor, lab)
        if v not in b.vid:
            raise WindowError("basic chamber is not inside the ball")
        img = word.apply(v)
        if img not in b.vid:
            raise WindowError("image of the basic chamber escapes the ball")
        f[lab] = labelling_C(img)
    dec = decompose_hom(f, moduli, moduli)
    if not dec.is_automorphism():
        raise ValueError("label action is not an automorphism")
    classification = []
    for i, p in enumerate(dec.gs):
        m = moduli[dec.mu[i]]
        diffs = {(p[(t + 1) % m] - p[t]) % m for t in range(m)}
        if diffs == {1 % m}:
            kind = "rotation"
            a = p[0]
        elif diffs == {(-1) % m}:
            kind = "reflection"
            a = p[0]
        else:
            raise ValueError(f"label permutation {p} is neither rotation nor reflection")
        classification.append((kind, a))
    _signature_check(word, b, dec, classification)
    # part 1: C o phi = C o phi o D o C on the whole ball
    for vid, v in enumerate(b.vertices):
        img = word.apply(v)
        if img in b.vid:
            expected = dec.apply(labelling_C(v))
            assert labelling_C(img) == expected, "C o phi != C o phi o D o C"
    return dec.mu, dec.gs, classification


def _signature_check(word, b, dec, classification):
    """Neighbor-count signature: offsets w around the center map to offsets
    w (rotation) or d+1-w (reflection), with Gaussian-binomial counts."""
    center = b.center
    img_center = word.apply(center)
    if img_center not in b.vid or b.dist[b.vid[img_center]] + 1 > b.radius:
        need = (b.dist[b.vid[img_center]] + 1 if img_center in b.vid
                else b.radius + 1)
        raise WindowError("signature check needs the image center's neighbors "
                          f"in the window; radius >= {need} required")
    moduli = b.descriptor.label_moduli()
    counts = _offset_counts(b, center)
    img_counts = _offset_counts(b, img_center)
    for i in range(b.descriptor.r):
        j = dec.mu[i]
        kind, _a = classification[i]
        m = moduli[j]
        for w in range(1, m):
            expected_w = w if kind == "rotation" else (m - w) % m
            if counts[i].get(w) != img_counts[j].get(expected_w):
                raise ValueError(
                    f"signature disagreement in factor {i}: offset {w} count "
                    f"{counts[i].get(w)} vs image offset {expected_w} count "
                    f"{img_counts[j].get(expected_w)}")
            q = b.descriptor.models[i].residue_size
            assert counts[i].get(w) == gaussian_binomial(m, w, q)


def _offset_counts(b, v):
    """Per factor: {label offset w: number of neighbors of v with that
    offset}, counted on the ball's edge set."""
    vid = b.vid[v]
    lab = labelling_C(v)
    moduli = b.descriptor.label_moduli()
    counts = [{} for _ in range(b.descriptor.r)]
    for (a, c, i) in b.edges:
        if a == vid or c == vid:
            other = c if a == vid else a
            w = (labelling_C(b.vertices[other])[i] - lab[i]) % moduli[i]
            counts[i][w] = counts[i].get(w, 0) + 1
    return counts


# ---------------------------------------------------------------------------
# normal form
# ---------------------------------------------------------------------------

def _restoring_element(word, descriptor):
    """Per-factor matrices A with act(A) o word mapping the basic chamber to
    itself and the origin to itself.  The image chamber's adapted chart is
    monomial on diagonal classes; its inverse followed by the coordinate
    reversal lands on the basic chamber, and shift powers fix the origin."""
    from .subdivision import chamber_chart
    from .field import _solve_linear
    delta = basic_chamber(descriptor)
    img_delta = [word.apply(v) for v in delta.vertices()]
    for v in img_delta:
        if not in_standard_apartment(v):
            raise WindowError(
                "word does not preserve the standard apartment; the normal "
                "form is computed for apartment-preserving words only")
    g_parts = []
    for i, (model, d) in enumerate(descriptor.factors):
        comps = []
        seen = set()
        for v in img_delta:
            c = v.components[i]
            if c not in seen:
                seen.add(c)
                comps.append(c)
        B, order, js = chamber_chart(comps)
        n = d + 1
        inv_cols = []
        for j in range(n):
            rhs = [model.one() if k == j else model.zero() for k in range(n)]
            inv_cols.append(_solve_linear(model, [row[:] for row in B], rhs))
        binv = [[inv_cols[j][k] for j in range(n)] for k in range(n)]
        rev = [[model.one() if i2 + j2 == n - 1 else model.zero()
                for j2 in range(n)] for i2 in range(n)]
        g_parts.append(_matmul(model, rev, binv))
    origin = descriptor.origin()
    h_origin = act(g_parts, word.apply(origin))
    g_full = []
    for i, (model, d) in enumerate(descriptor.factors):
        ell = h_origin.components[i].label()
        smat = matrix_power(model, shift_generator(model, d + 1), (-ell) % (d + 1))
        g_full.append(_matmul(model, smat, g_parts[i]))
    return g_full


def _transpose_inverse(model, mat):
    from .field import _solve_linear
    n = len(mat)
    at = [[mat[j][i] for j in range(n)] for i in range(n)]
    cols = []
    for j in range(n):
        rhs = [model.one() if k == j else model.zero() for k in range(n)]
        cols.append(_solve_linear(model, [row[:] for row in at], rhs))
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def normal_form(word, b):
    """Correctives (g, r, mu) with (prod lambda_i^{r_i}) g phi = sigma_mu on
    the window's standard apartment: an apartment-and-chamber-restoring
    element plus shift powers fixing the origin give a map whose label
    action determines the mask r; composing with lambda^r moves the basic
    chamber to the opposite chamber, so a second restoration is computed
    and conjugated across lambda (dual of g L is (g^T)^{-1} L*), keeping
    the corollary's lambda-g-phi shape.

    Returns (g_matrices, r_mask, mu, report)."""
    descriptor = b.descriptor
    apt_ids = [i for i, v in enumerate(b.vertices) if in_standard_apartment(v)]
    for i in apt_ids:
        if not in_standard_apartment(word.apply(b.vertices[i])):
            raise WindowError(
                "word does not preserve the standard apartment; the normal "
                "form is computed for apartment-preserving words only")
    g1 = _restoring_element(word, descriptor)
    corrected = AutWord(descriptor, word.gens + [{"kind": "group", "matrices": g1}])
    mu, gs, classification = label_action(corrected, b)
    r_mask = [1 if kind == "reflection" else 0 for kind, _a in classification]
    for (kind, a) in classification:
        if a != 0:
            raise AssertionError("origin fix failed; label action has a != 0")
    g_total = g1
    if any(r_mask):
        with_lambda = AutWord(descriptor, corrected.gens +
                              [{"kind": "lambda", "mask": r_mask}])
        g2 = _restoring_element(with_lambda, descriptor)
        mu, gs, cls2 = label_action(
            AutWord(descriptor, with_lambda.gens +
                    [{"kind": "group", "matrices": g2}]), b)
        assert all(kind == "rotation" and a == 0 for kind, a in cls2)
        g_total = []
        for i, (model, d) in enumerate(descriptor.factors):
            g2i = _transpose_inverse(model, g2[i]) if r_mask[i] else g2[i]
            g_total.append(_matmul(model, g2i, g1[i]))
    final = AutWord(descriptor, word.gens +
                    [{"kind": "group", "matrices": g_total},
                     {"kind": "lambda", "mask": r_mask}])
    violations = []
    for i in apt_ids:
        v = b.vertices[i]
        img = final.apply(v)
        pt = apartment_point_of_vertex(v)
        want = sigma_mu(pt, list(mu))
        if not in_standard_apartment(img) or apartment_point_of_vertex(img) != want:
            violations.append({
                "vertex": [c.serialize() for c in v.components],
                "image": [c.serialize() for c in img.components],
            })
    report = {
        "passed": not violations,
        "apartment_vertices_checked": len(apt_ids),
        "violations": violations,
    }
    return g_total, r_mask, list(mu), report


def _matmul(model, a, b):
    n = len(a)
    out = [[model.zero() for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for k in range(n):
            if a[i][k].valuation() != INF:
                for j in range(n):
                    out[i][j] = out[i][j] + a[i][k] * b[k][j]
    return out
