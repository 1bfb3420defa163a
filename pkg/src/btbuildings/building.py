"""The building B^d_k and products B as polysimplicial complexes.

Vertices of a product building are tuples of lattice classes, one per
factor.  Balls are undirected 1-skeleton windows around a center, built
factor by factor and assembled with the L1 distance; the directed-edge
structure, labelling and projections are computed inside such windows.
"""

from fractions import Fraction

from .errors import BudgetError
from .field import INF, FieldElement
from .lattice import (
    VertexClass, all_neighbors, canonical_form, class_pair_min_valuation,
    det_valuation_exact, pair_index_normalized, solve_in_basis_valuations,
    standard_vertex, vertex_from_diagonal,
)


def absolute_ramification(model):
    """Ramification of the model over the root of its extension tower."""
    e = 1
    while getattr(model, "tower", None):
        tower = model.tower
        if tower[0] == "helper":
            break
        model = tower[0]
        e *= tower[1]
    return e


class BuildingDescriptor:
    """Product of the buildings of SL_{d_i+1} over the fields k_i."""

    def __init__(self, factors):
        factors = tuple(factors)
        if not factors:
            raise ValueError("at least one factor required")
        for model, d in factors:
            if d < 1:
                raise ValueError("factor dimension must be >= 1")
        self.factors = factors
        self.r = len(factors)
        self.dims = tuple(d for _, d in factors)
        self.models = tuple(m for m, _ in factors)

    def __repr__(self):
        return f"BuildingDescriptor({self.factors!r})"

    def origin(self):
        return PolyVertex(tuple(standard_vertex(m, d + 1) for m, d in self.factors))

    def label_moduli(self):
        return tuple(d + 1 for d in self.dims)

    def check_vertex(self, x):
        if len(x.components) != self.r:
            raise ValueError("component count mismatch")
        for (m, d), c in zip(self.factors, x.components):
            if c.model is not m or c.n != d + 1:
                raise ValueError("component does not belong to this building")


class PolyVertex:
    """Per-factor tuple of canonical lattice classes."""

    __slots__ = ("components", "_hash")

    def __init__(self, components):
        self.components = tuple(components)
        self._hash = hash(self.components)

    def __eq__(self, other):
        return isinstance(other, PolyVertex) and self.components == other.components

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"PolyVertex({self.components!r})"

    def sort_key(self):
        return tuple(c.sort_key() for c in self.components)

    def replace(self, i, comp):
        parts = list(self.components)
        parts[i] = comp
        return PolyVertex(parts)


class PolyFace:
    """Product of per-factor simplicial faces, stored by sorted vertex tuples."""

    __slots__ = ("factors", "_hash")

    def __init__(self, factors):
        self.factors = tuple(tuple(sorted(f, key=lambda v: v.sort_key()))
                             for f in factors)
        self._hash = hash(self.factors)

    def __eq__(self, other):
        return isinstance(other, PolyFace) and self.factors == other.factors

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"PolyFace(dim={self.dim_vector()})"

    def dim_vector(self):
        return tuple(len(f) - 1 for f in self.factors)

    def dim(self):
        return sum(self.dim_vector())

    def vertices(self):
        """All product vertices of the face, in lexicographic factor order."""
        out = [()]
        for f in self.factors:
            out = [t + (v,) for t in out for v in f]
        return [PolyVertex(t) for t in out]


class ApartmentPoint:
    """Point of an apartment: per factor a basis (None = standard) and a
    rational exponent vector, normalized so the first exponent is 0.

    The exponent of basis vector v_j is -log_q rho(v_j); a vertex whose
    lattice is <pi^{m_0} v_0, .., pi^{m_d} v_d> sits at exponents (-m_j)."""

    __slots__ = ("factors",)

    def __init__(self, factors):
        norm = []
        for basis, exps in factors:
            exps = tuple(Fraction(e) for e in exps)
            shift = exps[0]
            norm.append((basis, tuple(e - shift for e in exps)))
        self.factors = tuple(norm)

    def exponents(self, i=0):
        return self.factors[i][1]

    def __eq__(self, other):
        return isinstance(other, ApartmentPoint) and all(
            (b1 is b2 or b1 == b2) and e1 == e2
            for (b1, e1), (b2, e2) in zip(self.factors, other.factors))

    def __hash__(self):
        return hash(tuple(e for _, e in self.factors))

    def __repr__(self):
        return f"ApartmentPoint({[e for _, e in self.factors]!r})"

    def is_integral(self):
        return all(all(x.denominator == 1 for x in e) for _, e in self.factors)

    def to_vertex(self, descriptor):
        if not self.is_integral():
            raise ValueError("non-integral apartment point is not a vertex")
        comps = []
        for (m, d), (basis, exps) in zip(descriptor.factors, self.factors):
            if basis is not None:
                pi = m.uniformizer()
                cols = [[basis[i][j] * pi ** (-int(exps[j])) for j in range(d + 1)]
                        for i in range(d + 1)]
                comps.append(canonical_form(m, cols))
            else:
                comps.append(vertex_from_diagonal(m, tuple(-int(x) for x in exps)))
        return PolyVertex(comps)


def apartment_point_of_vertex(x):
    """The apartment point of a vertex whose components are all diagonal."""
    factors = []
    for c in x.components:
        exps = c.diagonal_exponents()
        if exps is None:
            raise ValueError("vertex is not in the standard apartment")
        factors.append((None, tuple(-m for m in exps)))
    return ApartmentPoint(factors)


def in_standard_apartment(x):
    return all(c.is_diagonal() for c in x.components)


# ---------------------------------------------------------------------------
# basic chamber, labelling
# ---------------------------------------------------------------------------

def basic_chamber_factor(model, d):
    """Vertices [L_i], L_i = <T_0,..,T_{d-i}, pi T_{d+1-i},..,pi T_d>."""
    out = []
    for i in range(d + 1):
        exps = (0,) * (d + 1 - i) + (1,) * i
        out.append(vertex_from_diagonal(model, exps))
    return out


def basic_chamber(descriptor):
    return PolyFace([basic_chamber_factor(m, d) for m, d in descriptor.factors])


def labelling_C(x):
    return tuple(c.label() for c in x.components)


def labelling_D(descriptor, lab):
    """Inverse of C restricted to the basic chamber."""
    comps = []
    for (m, d), l in zip(descriptor.factors, lab):
        l = l % (d + 1)
        comps.append(vertex_from_diagonal(m, (0,) * (d + 1 - l) + (1,) * l))
    return PolyVertex(comps)


# ---------------------------------------------------------------------------
# chains and faces
# ---------------------------------------------------------------------------

def _containment_shift(x, y):
    """Minimal c with pi^c L_y <= L_x (primitive representatives)."""
    return -class_pair_min_valuation(x, y)


def _chain_order(comps):
    """An ordering of distinct classes realizing L_0 >= .. >= L_m >= pi L_0,
    or None.  Consecutive minimal shifts are optimal, so trying orderings is
    a complete decision procedure."""
    from itertools import permutations
    m = len(comps)
    if m == 1:
        return (0,)
    for perm in permutations(range(m)):
        shifts = 0
        ok = True
        for k in range(1, m):
            s = _containment_shift(comps[perm[k - 1]], comps[perm[k]])
            shifts += s
        if 1 - shifts >= _containment_shift(comps[perm[-1]], comps[perm[0]]):
            return perm
        # shifts telescope, so only the total matters; all orders checked
    return None


def is_face(descriptor, vertices):
    """True iff the set is a face: it is a full product of its per-factor
    projections and each projection admits the required chain."""
    vertices = list(vertices)
    if not vertices:
        return False
    seen = set()
    for v in vertices:
        descriptor.check_vertex(v)
        if v in seen:
            return False
        seen.add(v)
    per_factor = []
    for i in range(descriptor.r):
        comps = []
        keys = set()
        for v in vertices:
            c = v.components[i]
            k = (c.exps, c.lower)
            if k not in keys:
                keys.add(k)
                comps.append(c)
        per_factor.append(comps)
    count = 1
    for comps in per_factor:
        count *= len(comps)
    if count != len(vertices):
        return False
    expected = {PolyVertex(t) for t in _product_tuples(per_factor)}
    if expected != seen:
        return False
    for comps in per_factor:
        if len(comps) > 1 and _chain_order(comps) is None:
            return False
    return True


def _product_tuples(lists):
    out = [()]
    for lst in lists:
        out = [t + (v,) for t in out for v in lst]
    return out


# ---------------------------------------------------------------------------
# balls
# ---------------------------------------------------------------------------

class FactorBall:
    """Undirected 1-skeleton window of one factor building."""

    def __init__(self, model, d, center, radius, detail, budget):
        self.model = model
        self.d = d
        self.center = center
        self.radius = radius
        cost = radius * d * model.residue_size
        if cost > budget:
            raise BudgetError(
                f"ball cost {cost} exceeds budget {budget} (radius*d*q)")
        self.vertices = [center]
        self.vid = {center: 0}
        self.dist = [0]
        adj = {0: set()}
        frontier = [0]
        for depth in range(1, radius + 1):
            new = []
            for uid in frontier:
                for nb in all_neighbors(self.vertices[uid]):
                    vid = self.vid.get(nb)
                    if vid is None:
                        vid = len(self.vertices)
                        self.vertices.append(nb)
                        self.vid[nb] = vid
                        self.dist.append(depth)
                        adj[vid] = set()
                        new.append(vid)
                    adj[uid].add(vid)
                    adj[vid].add(uid)
            frontier = new
        if detail != "vertices":
            # close the edge set inside the window: expand the last level too
            for uid in frontier:
                for nb in all_neighbors(self.vertices[uid]):
                    vid = self.vid.get(nb)
                    if vid is not None:
                        adj[uid].add(vid)
                        adj[vid].add(uid)
        self.adj = {u: sorted(vs) for u, vs in adj.items()}
        self.faces = None
        if detail == "faces":
            self.faces = self._enumerate_faces()

    def _enumerate_faces(self):
        """All faces with >= 2 vertices inside the window, as sorted id
        tuples, via clique extension filtered by the chain condition."""
        faces = []
        n = self.d + 1

        def extend(clique, candidates):
            for idx, c in enumerate(candidates):
                new = clique + (c,)
                comps = [self.vertices[i] for i in new]
                if _chain_order(comps) is None:
                    continue
                faces.append(new)
                if len(new) < n:
                    nxt = [x for x in candidates[idx + 1:] if x in self._adjset[c]]
                    extend(new, nxt)

        self._adjset = {u: set(vs) for u, vs in self.adj.items()}
        for u in range(len(self.vertices)):
            extend((u,), [v for v in self.adj[u] if v > u])
        return faces


class Ball:
    """Window of a product building: vertices at L1 1-skeleton distance
    <= radius from the center, edges closed within the window, and faces
    up to chambers when requested."""

    def __init__(self, descriptor, center, radius, detail="edges", budget=2000):
        if detail not in ("vertices", "edges", "faces"):
            raise ValueError(f"unknown detail level {detail!r}")
        descriptor.check_vertex(center)
        self.descriptor = descriptor
        self.center = center
        self.radius = radius
        self.detail = detail
        self.factor_balls = [
            FactorBall(m, d, center.components[i], radius, detail, budget)
            for i, (m, d) in enumerate(descriptor.factors)]
        self._assemble()

    def _assemble(self):
        r = self.descriptor.r
        fbs = self.factor_balls
        tuples = [((), 0)]
        for fb in fbs:
            tuples = [(t + (i,), dtot + fb.dist[i])
                      for t, dtot in tuples
                      for i in range(len(fb.vertices))
                      if dtot + fb.dist[i] <= self.radius]
        tuples.sort(key=lambda td: (td[1], td[0]))
        self.vertices = []
        self.vid = {}
        self.dist = []
        self._ftuple = []
        for t, dtot in tuples:
            v = PolyVertex(tuple(fbs[i].vertices[t[i]] for i in range(r)))
            self.vid[v] = len(self.vertices)
            self.vertices.append(v)
            self.dist.append(dtot)
            self._ftuple.append(t)
        self.labels = [labelling_C(v) for v in self.vertices]
        self.edges = []
        if self.detail != "vertices":
            for uid, t in enumerate(self._ftuple):
                for i in range(r):
                    for nb in fbs[i].adj[t[i]]:
                        t2 = t[:i] + (nb,) + t[i + 1:]
                        vid = self._tuple_id(t2)
                        if vid is not None and vid > uid:
                            self.edges.append((uid, vid, i))
        self.chambers = None
        self.faces = None
        if self.detail == "faces":
            self._assemble_faces()

    def _tuple_id(self, t):
        v = PolyVertex(tuple(self.factor_balls[i].vertices[t[i]]
                             for i in range(len(t))))
        return self.vid.get(v)

    def _assemble_faces(self):
        r = self.descriptor.r
        fbs = self.factor_balls
        per_factor = []
        for fb in fbs:
            singletons = [(u,) for u in range(len(fb.vertices))]
            per_factor.append(singletons + [tuple(sorted(f)) for f in fb.faces])
        self.faces = []
        self.chambers = []
        stack = [((), 0)]
        for i, choices in enumerate(per_factor):
            stack = [(t + (c,), dim + len(c) - 1) for t, dim in stack for c in choices]
        for t, dim in stack:
            ids = []
            ok = True
            for combo in _product_tuples([list(c) for c in t]):
                v = PolyVertex(tuple(fbs[i].vertices[combo[i]] for i in range(r)))
                vid = self.vid.get(v)
                if vid is None:
                    ok = False
                    break
                ids.append(vid)
            if not ok or dim == 0:
                continue
            face = PolyFace([[fbs[i].vertices[u] for u in t[i]] for i in range(r)])
            self.faces.append(face)
            if face.dim_vector() == self.descriptor.dims:
                self.chambers.append(face)

    def __contains__(self, v):
        return v in self.vid

    def contains_face(self, face):
        return all(v in self.vid for v in face.vertices())

    # -- export --

    def to_json_obj(self):
        desc = []
        for m, d in self.descriptor.factors:
            kind = {"kind": m.kind, "d": d}
            if m.kind == "padic":
                kind["p"] = m.p
            else:
                kind["q"] = m.q
                kind["var"] = m.var
            desc.append(kind)
        verts = []
        for i, v in enumerate(self.vertices):
            verts.append({
                "id": i,
                "matrix_per_factor": [c.serialize() for c in v.components],
                "label": list(self.labels[i]),
            })
        edges = []
        for (a, b, i) in self.edges:
            fab = pair_index_normalized(self.vertices[a].components[i],
                                        self.vertices[b].components[i])
            fba = pair_index_normalized(self.vertices[b].components[i],
                                        self.vertices[a].components[i])
            u, v_, fuv = (a, b, fab) if fab <= fba else (b, a, fba)
            m = self.descriptor.models[i]
            edges.append({
                "from": u, "to": v_, "factor": i,
                "directed": fuv == 1,
                "length": str(Fraction(1, absolute_ramification(m))),
            })
        obj = {"descriptor": desc,
               "center": 0,
               "radius": self.radius,
               "vertices": verts,
               "edges": edges}
        if self.chambers is not None:
            obj["chambers"] = sorted(
                sorted(self.vid[v] for v in ch.vertices()) for ch in self.chambers)
        return obj

    def to_dot(self):
        palette = ["black", "red", "blue", "green", "orange", "purple"]
        lines = ["graph ball {"]
        for i, v in enumerate(self.vertices):
            lab = self.labels[i]
            color = palette[sum(lab) % len(palette)]
            lines.append(f'  v{i} [label="{",".join(map(str, lab))}", color={color}];')
        for (a, b, i) in self.edges:
            lines.append(f"  v{a} -- v{b} [label=\"f{i}\"];")
        lines.append("}")
        return "\n".join(lines)


def ball(descriptor, center, radius, detail="edges", budget=2000):
    return Ball(descriptor, center, radius, detail=detail, budget=budget)


# ---------------------------------------------------------------------------
# metric structure
# ---------------------------------------------------------------------------

def distance_f(x, y):
    """Directed distance: sum over factors of [M_i : L_i] on normalized
    representatives.  Not symmetric."""
    return sum(pair_index_normalized(a, b)
               for a, b in zip(x.components, y.components))


def factor_window_fvals(c, window_exps):
    """f(c, y) for every diagonal class y in the window, sharing one
    triangular solve: for y with primitive exponents m, the minimal
    containment shift is -min_j(m_j + w_j), w_j the column minima of
    v(T^{-1}), and f = n*c + sum(m) - v(det T)."""
    n = c.n
    vals = solve_in_basis_valuations(c)
    w = [min(vals[i][j] for i in range(n)) for j in range(n)]
    D = c.det_valuation()
    out = []
    for m in window_exps:
        shift = -min(mj + wj for mj, wj in zip(m, w))
        out.append(n * shift + sum(m) - D)
    return out


def is_directed_edge(x, y):
    """Edge x -> y: adjacent in one factor with f = 1 there, equal elsewhere."""
    diff = None
    for i, (a, b) in enumerate(zip(x.components, y.components)):
        if a != b:
            if diff is not None:
                return False
            diff = i
    if diff is None:
        return False
    return pair_index_normalized(x.components[diff], y.components[diff]) == 1


def project_apartment(x, bases=None):
    """Norm-formula projection tau_Lambda: per factor, the exponent of the
    basis vector v_j is m_j = min_i v(u_i) where u solves T u = v_j against
    the canonical lattice basis T."""
    factors = []
    for k, c in enumerate(x.components):
        basis = None if bases is None else bases[k]
        if basis is None:
            vals = solve_in_basis_valuations(c)
            exps = tuple(min(vals[i][j] for i in range(c.n)) for j in range(c.n))
            factors.append((None, exps))
        else:
            from .field import _solve_linear
            model = c.model
            prim = c.primitive_matrix()
            exps = []
            for j in range(c.n):
                rhs = [basis[i][j] for i in range(c.n)]
                sol = _solve_linear(model, [row[:] for row in prim], rhs)
                exps.append(min(s.valuation() for s in sol))
            factors.append((basis, tuple(exps)))
    return ApartmentPoint(factors)


# ---------------------------------------------------------------------------
# group action, involution, factor exchange
# ---------------------------------------------------------------------------

def act_factor(g, c):
    model = c.model
    n = c.n
    g = [[model.element(x) if not isinstance(x, FieldElement) else x for x in row]
         for row in g]
    if det_valuation_exact(model, g) == INF:
        raise ValueError("singular matrix")
    prim = c.primitive_matrix()
    cols = [[_dot(model, g, prim, i, j) for j in range(n)] for i in range(n)]
    return canonical_form(model, cols)


def _dot(model, a, b, i, j):
    acc = model.zero()
    for k in range(len(b)):
        acc = acc + a[i][k] * b[k][j]
    return acc


def act(gs, x):
    """[L_i] -> [g_i L_i] per factor; g_i = None means identity."""
    comps = []
    for g, c in zip(gs, x.components):
        comps.append(c if g is None else act_factor(g, c))
    return PolyVertex(comps)


def shift_generator(model, n):
    """The cyclic generator f: T_j -> T_{j-1} (j > 0), T_0 -> pi T_{d}.
    Its matrix has det valuation 1 and permutes the basic chamber cyclically."""
    pi = model.uniformizer()
    mat = [[model.zero() for _ in range(n)] for _ in range(n)]
    mat[n - 1][0] = pi
    for j in range(1, n):
        mat[j - 1][j] = model.one()
    return mat


def matrix_power(model, mat, k):
    n = len(mat)
    if k < 0:
        from .field import _solve_linear
        inv_cols = []
        for j in range(n):
            rhs = [model.one() if i == j else model.zero() for i in range(n)]
            inv_cols.append(_solve_linear(model, [row[:] for row in mat], rhs))
        mat = [[inv_cols[j][i] for j in range(n)] for i in range(n)]
        k = -k
    out = [[model.one() if i == j else model.zero() for j in range(n)] for i in range(n)]
    for _ in range(k):
        out = [[_dot(model, out, mat, i, j) for j in range(n)] for i in range(n)]
    return out


def involution_lambda(x, mask):
    """Dual-lattice involution on the masked factors."""
    from .lattice import dual as _dual
    comps = []
    for c, m in zip(x.components, mask):
        comps.append(_dual(c) if m else c)
    return PolyVertex(comps)


def sigma_mu(point, mu):
    """Formal factor-exchange on apartment points: component i of the image
    is the exchange-image of component mu(i).  mu must respect dimensions
    (the fields may differ; the exchange is defined on apartments only)."""
    r = len(point.factors)
    if sorted(mu) != list(range(r)):
        raise ValueError("mu is not a permutation")
    dims = [len(e) - 1 for _, e in point.factors]
    for i in range(r):
        if dims[mu[i]] != dims[i]:
            raise ValueError("mu does not respect dimensions")
    factors = [point.factors[mu[i]] for i in range(r)]
    return ApartmentPoint(factors)
