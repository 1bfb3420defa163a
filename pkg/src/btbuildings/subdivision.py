"""Subdivision machinery: dilated simplices eta_N and their alcove charts,
markings and the subdivided complex B[M], extension embeddings nu and
restrictions delta, and the check that the structure induced from the
bigger building equals the e-fold subdivision.
"""

from fractions import Fraction
from itertools import permutations, product

from .building import (ApartmentPoint, PolyVertex, _chain_order,
                       _containment_shift)
from .errors import BudgetError
from .field import INF
from .lattice import canonical_form, pair_index_normalized


# ---------------------------------------------------------------------------
# alcove charts of the dilated simplex eta_N
# ---------------------------------------------------------------------------

class AlcoveChart:
    """Chamber eta(sigma, a) of the standard apartment, named canonically
    (a_0 = 0, lexicographically least among the namings of its chamber)."""

    __slots__ = ("d", "sigma", "a")

    def __init__(self, d, sigma, a):
        self.d = d
        self.sigma = tuple(sigma)
        self.a = tuple(a)
        if self.a[0] != 0:
            raise ValueError("canonical naming requires a_0 = 0")

    def __repr__(self):
        return f"AlcoveChart(sigma={self.sigma}, a={self.a})"

    def __eq__(self, other):
        return (isinstance(other, AlcoveChart) and self.d == other.d
                and self.sigma == other.sigma and self.a == other.a)

    def __hash__(self):
        return hash((self.d, self.sigma, self.a))

    def vertices(self):
        """The d+1 vertices as shift-normalized integer coordinate tuples."""
        d = self.d
        out = []
        for m in range(d + 1):
            x = [0] * (d + 1)
            for i in range(d + 1):
                x[self.sigma[i]] = (1 if i >= d + 1 - m else 0) - self.a[i]
            x0 = x[0]
            out.append(tuple(xi - x0 for xi in x))
        return out

    def key(self):
        return tuple(sorted(self.vertices()))


def eta_membership(vertex, N):
    """Closed condition x_0 <= x_1 <= .. <= x_d <= x_0 + N on a coordinate
    tuple (shift-invariant)."""
    d = len(vertex) - 1
    for i in range(d):
        if not vertex[i] <= vertex[i + 1]:
            return False
    return vertex[d] <= vertex[0] + N


def eta_chambers(d, N, d_bound=4, n_bound=6):
    """The alcoves whose closed chamber lies inside eta_N, canonical names,
    ordered by their sorted vertex sets.  |result| = N^d."""
    if d > d_bound or N > n_bound:
        raise BudgetError(f"eta_chambers bounds exceeded: d={d}, N={N}")
    if N < 1:
        raise ValueError("N must be >= 1")
    seen = {}
    window = range(-(N + 1), N + 2)
    for sigma in permutations(range(d + 1)):
        for a_rest in product(window, repeat=d):
            chart = AlcoveChart(d, sigma, (0,) + a_rest)
            verts = chart.vertices()
            if all(eta_membership(v, N) for v in verts):
                key = tuple(sorted(verts))
                prev = seen.get(key)
                if prev is None or (chart.sigma, chart.a) < (prev.sigma, prev.a):
                    seen[key] = chart
    return [seen[k] for k in sorted(seen)]


def eta_integer_points(d, N):
    """Integer points of eta_N, normalized z_0 = 0: 0 <= z_1 <= .. <= z_d <= N."""
    out = []
    for z_rest in product(range(N + 1), repeat=d):
        z = (0,) + z_rest
        if all(z[i] <= z[i + 1] for i in range(d)):
            out.append(z)
    return out


def _barycentric_of_point(z, N):
    """Weights lambda_m (m = 0..d) of z over the corners of eta_N."""
    d = len(z) - 1
    lam = [Fraction(0)] * (d + 1)
    for m in range(1, d + 1):
        lam[m] = Fraction(z[d + 1 - m] - z[d - m], N)
    lam[0] = 1 - sum(lam[1:])
    assert all(x >= 0 for x in lam) and sum(lam) == 1
    return tuple(lam)


# ---------------------------------------------------------------------------
# markings and the subdivided complex
# ---------------------------------------------------------------------------

class Marking:
    """Per-factor edge numbers; product-complex edges inherit their factor's
    number, which is the required coherence on every closed face."""

    __slots__ = ("per_factor",)

    def __init__(self, per_factor):
        per_factor = tuple(int(m) for m in per_factor)
        if any(m < 1 for m in per_factor):
            raise ValueError("marking numbers must be positive")
        self.per_factor = per_factor

    def __repr__(self):
        return f"Marking({self.per_factor})"


def chamber_chart(comps):
    """Adapted apartment chart for a factor face: a basis matrix B (columns
    u_1..u_n over the factor field), the chain order, and the cumulative
    colengths js, so that the k-th chain vertex is
    [<pi u_1,..,pi u_{js[k]}, u_{js[k]+1},..,u_n>].

    The chain's residue flag is diagonalized over the residue field and
    lifted through the first vertex's canonical basis."""
    model = comps[0].model
    n = comps[0].n
    order = _chain_order(comps)
    if order is None:
        raise ValueError("vertex set is not a face chain")
    chain = [comps[i] for i in order]
    L0 = chain[0]
    T0 = L0.primitive_matrix()
    gf = model.residue_gf()
    # residue coordinates of M_k's generators in L0/pi L0
    from .field import _solve_linear
    flags = []
    shift = 0
    pi = model.uniformizer()
    for k in range(1, len(chain)):
        shift += _containment_shift(chain[k - 1], chain[k])
        Tk = chain[k].primitive_matrix()
        vecs = []
        for j in range(n):
            rhs = [Tk[i][j] * pi ** shift for i in range(n)]
            sol = _solve_linear(model, [row[:] for row in T0], rhs)
            row = []
            for x in sol:
                if x.valuation() != INF and x.valuation() < 0:
                    raise ValueError("face chain solve gave a non-integral coordinate")
                row.append(model.to_digits(x, 1)[0])
            vecs.append(row)
        flags.append(_row_space(gf, vecs))
    js = [0] + [n - len(f) for f in flags]
    # adapted residue basis: the last n - js[k] vectors span W_k; membership
    # is tested against an echelonized copy of the picked vectors
    picked = []
    echelon = []
    spans = flags[::-1] + [_row_space(gf, [[1 if i == j else 0 for i in range(n)]
                                           for j in range(n)])]
    for space in spans:
        for cand in space:
            if not _in_span(gf, echelon, cand):
                picked.append(cand)
                echelon = _row_space(gf, echelon + [cand])
    assert len(picked) == n
    picked.reverse()
    B = [[None] * n for _ in range(n)]
    for j, r in enumerate(picked):
        for i in range(n):
            acc = model.zero()
            for c, coeff in enumerate(r):
                if coeff:
                    acc = acc + model.lift_residue(coeff) * T0[i][c]
            B[i][j] = acc
    # verify the chart reproduces the chain
    for k, cls in enumerate(chain):
        exps = [1] * js[k] + [0] * (n - js[k])
        cols = [[B[i][j] * pi ** exps[j] for j in range(n)] for i in range(n)]
        assert canonical_form(model, cols) == cls, "chart verification failed"
    return B, order, js


def _row_space(gf, vecs):
    """Reduced basis (list of tuples) of the span of vecs over gf."""
    basis = []
    for v in vecs:
        v = list(v)
        for b in basis:
            lead = next(i for i, x in enumerate(b) if x)
            if v[lead]:
                c = gf.mul(v[lead], gf.inv(b[lead]))
                v = [gf.sub(x, gf.mul(c, y)) for x, y in zip(v, b)]
        if any(v):
            lead = next(i for i, x in enumerate(v) if x)
            inv = gf.inv(v[lead])
            basis.append(tuple(gf.mul(inv, x) for x in v))
            basis.sort(key=lambda b: next(i for i, x in enumerate(b) if x))
    return basis


def _in_span(gf, basis, v):
    v = list(v)
    for b in basis:
        lead = next(i for i, x in enumerate(b) if x)
        if v[lead]:
            c = gf.mul(v[lead], gf.inv(b[lead]))
            v = [gf.sub(x, gf.mul(c, y)) for x, y in zip(v, b)]
    return not any(v)


class SubdividedComplex:
    """Result of subdividing the chambers of a window: vertices are
    barycentric points over building vertices (chart-independent keys),
    with exact rational chart coordinates for export."""

    def __init__(self, descriptor, marking):
        self.descriptor = descriptor
        self.marking = marking
        self.points = []
        self.pid = {}
        self.coords = []
        self.charts = []
        self.edges = set()
        self.subchambers = []

    def _point_id(self, key, coords, chart_id):
        i = self.pid.get(key)
        if i is None:
            i = len(self.points)
            self.pid[key] = i
            self.points.append(key)
            self.coords.append(coords)
            self.charts.append(chart_id)
        return i

    def to_json_obj(self):
        verts = []
        for i, key in enumerate(self.points):
            carriers = []
            for fpoint in key:
                carriers.append([{"vertex": c.serialize(), "weight": str(lam)}
                                 for c, lam in fpoint])
            verts.append({
                "id": i,
                "carrier": carriers,
                "coords": [[str(x) for x in factor_coords]
                           for factor_coords in self.coords[i]],
            })
        return {
            "marking": list(self.marking.per_factor),
            "vertices": verts,
            "edges": sorted([a, b, f] for (a, b, f) in self.edges),
            "chambers": sorted(sorted(ch) for ch in self.subchambers),
        }


def subdivide_chambers(descriptor, chambers, marking):
    """Replace each closed chamber product(F_i) by product(F_i[M_i])."""
    if len(marking.per_factor) != descriptor.r:
        raise ValueError("marking factor count mismatch")
    sub = SubdividedComplex(descriptor, marking)
    for chamber_id, chamber in enumerate(chambers):
        factor_data = []
        for i, fverts in enumerate(chamber.factors):
            N = marking.per_factor[i]
            d = len(fverts) - 1
            B, order, js = chamber_chart(list(fverts))
            assert js == list(range(d + 1)), "chamber chain must have unit steps"
            chain = [fverts[j] for j in order]
            pt_index = {}
            plist = []
            for z in eta_integer_points(d, N):
                lam = _barycentric_of_point(z, N)
                key = tuple(sorted(((chain[m], lam[m]) for m in range(d + 1)
                                    if lam[m] > 0),
                                   key=lambda cl: cl[0].sort_key()))
                coords = tuple(Fraction(zi, N) for zi in z)
                pt_index[z] = len(plist)
                plist.append((key, coords))
            alcoves = [[pt_index[v] for v in chart.vertices()]
                       for chart in eta_chambers(d, N)]
            factor_data.append((plist, alcoves))
        # assemble product points per alcove product
        alcove_lists = [fd[1] for fd in factor_data]
        plists = [fd[0] for fd in factor_data]
        for combo in product(*alcove_lists):
            ids = {}
            vertex_tuples = list(product(*combo))
            pids = []
            for vt in vertex_tuples:
                key = tuple(plists[i][vt[i]][0] for i in range(descriptor.r))
                coords = tuple(plists[i][vt[i]][1] for i in range(descriptor.r))
                pids.append(sub._point_id(key, coords, chamber_id))
            self_ids = {vt: pid for vt, pid in zip(vertex_tuples, pids)}
            sub.subchambers.append(tuple(sorted(set(pids))))
            # edges: vary one factor within its alcove (factor alcoves are
            # simplices, so all pairs there are edges)
            for vt in vertex_tuples:
                for i in range(descriptor.r):
                    for other in combo[i]:
                        if other == vt[i]:
                            continue
                        vt2 = vt[:i] + (other,) + vt[i + 1:]
                        a, b = self_ids[vt], self_ids[vt2]
                        if a != b:
                            sub.edges.add((min(a, b), max(a, b), i))
    sub.subchambers = sorted(set(sub.subchambers))
    return sub


def subdivide_ball(b, marking):
    """Subdivide every chamber of the ball; requires detail='faces'."""
    if b.chambers is None:
        raise ValueError("ball was built without chambers; use detail='faces'")
    return subdivide_chambers(b.descriptor, b.chambers, marking)


# ---------------------------------------------------------------------------
# extension embedding nu and restriction delta
# ---------------------------------------------------------------------------

def nu_embed(v, ext):
    """[L] -> [L (x) O_k]: embed the canonical basis entrywise and
    recanonicalize over the extension."""
    model = v.model
    if model is not ext.base:
        raise ValueError("vertex is not over the extension's base model")
    prim = v.primitive_matrix()
    n = v.n
    cols = [[ext.embed(prim[i][j]) for j in range(n)] for i in range(n)]
    return canonical_form(ext.extension, cols)


def nu_embed_point(p, ext):
    """nu on apartment points: exponents scale by e, bases embed."""
    factors = []
    for basis, exps in p.factors:
        nb = None
        if basis is not None:
            nb = [[ext.embed(x) for x in row] for row in basis]
        factors.append((nb, tuple(Fraction(x) * ext.e for x in exps)))
    return ApartmentPoint(factors)


def delta_restrict(p, ext):
    """Restriction of a norm on the extension side to the base: divides
    exponent coordinates by e.  The basis must be defined over the base."""
    factors = []
    for basis, exps in p.factors:
        nb = None
        if basis is not None:
            nb = []
            for row in basis:
                nrow = []
                for x in row:
                    y = ext.in_base(x)
                    if y is None:
                        raise ValueError("apartment basis is not defined over the base")
                    nrow.append(y)
                nb.append(nrow)
        factors.append((nb, tuple(Fraction(x) / ext.e for x in exps)))
    return ApartmentPoint(factors)


def skeleton_distance(x, y):
    """Undirected 1-skeleton distance between two classes in one factor:
    the largest elementary divisor of the normalized pair."""
    if x == y:
        return 0
    s = pair_index_normalized(x, y) + pair_index_normalized(y, x)
    assert s % x.n == 0
    return s // x.n


def verify_induced_structure(b, ext, report_limit=1):
    """Check that nu maps every subdivided chamber of B_{k'}[e] to a chamber
    of B_k.  Returns a report dict with pass/fail and the first failure."""
    from .building import BuildingDescriptor, is_face
    e = ext.e
    marking = Marking([e] * b.descriptor.r)
    sub = subdivide_ball(b, marking)
    big = BuildingDescriptor([(ext.extension, d) for d in b.descriptor.dims])
    failures = []
    checked = 0
    # image of every subdivided point: per factor, embed the carrier chart
    image = {}
    for pid, key in enumerate(sub.points):
        comps = []
        for i, fpoint in enumerate(key):
            comps.append(_image_vertex_of_factor_point(fpoint, ext))
        image[pid] = PolyVertex(tuple(comps))
    for ch in sub.subchambers:
        checked += 1
        img = [image[pid] for pid in ch]
        if len(set(img)) != len(img):
            failures.append({"subchamber": list(ch), "reason": "image not injective"})
        elif not is_face(big, img):
            failures.append({"subchamber": list(ch), "reason": "image is not a face"})
        else:
            dims = [len(set(v.components[i] for v in img)) - 1
                    for i in range(big.r)]
            if tuple(dims) != big.dims:
                failures.append({"subchamber": list(ch),
                                 "reason": f"image has dimension {dims}, not a chamber"})
        if failures and len(failures) >= report_limit:
            break
    return {
        "passed": not failures,
        "subchambers_checked": checked,
        "points": len(sub.points),
        "failures": failures,
    }


def _image_vertex_of_factor_point(fpoint, ext):
    """nu-image of a barycentric factor point with 1/e-integral weights:
    diagonalize over the carrier's chart and scale exponents by e."""
    e = ext.e
    carrier = [c for c, _ in fpoint]
    lams = [lam for _, lam in fpoint]
    if len(carrier) == 1:
        return nu_embed(carrier[0], ext)
    model = carrier[0].model
    n = carrier[0].n
    B, order, js = chamber_chart(carrier)
    chain_pos = {carrier[order[k]]: k for k in range(len(order))}
    # chart coordinates: chain vertex k sits at x = (0^{js[k]}, 1^{n-js[k]})
    coords = [Fraction(0)] * n
    for cls, lam in fpoint:
        j0 = js[chain_pos[cls]]
        for j in range(j0, n):
            coords[j] += lam
    scaled = [x * e for x in coords]
    assert all(x.denominator == 1 for x in scaled), "point is not 1/e-integral"
    pi_big = ext.extension.uniformizer()
    Bk = [[ext.embed(B[i][j]) for j in range(n)] for i in range(n)]
    cols = [[Bk[i][j] * pi_big ** (-int(scaled[j])) for j in range(n)]
            for i in range(n)]
    return canonical_form(ext.extension, cols)
