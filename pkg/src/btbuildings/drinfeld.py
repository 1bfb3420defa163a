"""Rigid points of products of Drinfeld spaces.

A rigid point is given by affine coordinates in an extension field K of
the factor fields; every quantity in scope is an exact power of the
absolute value of the tower root's uniformizer, so absolute values are
carried as rational exponents (AbsValue) and never as floats.
"""

import math
from fractions import Fraction
from itertools import product

from .building import ApartmentPoint, absolute_ramification
from .errors import BudgetError
from .field import INF, FieldElement, enumerate_residues, expand_over


def root_model(model):
    while getattr(model, "tower", None):
        if model.tower[0] == "helper":
            break
        model = model.tower[0]
    return model


def tower_chain(model):
    """Extension descriptors from the root up to the model."""
    from .field import ExtensionDescriptor
    chain = []
    m = model
    while getattr(m, "tower", None) and m.tower[0] != "helper":
        base, e, f = m.tower
        chain.append(ExtensionDescriptor(base, e=e, f=f, var=m.var))
        m = base
    chain.reverse()
    return chain


def tower_embed(x, target):
    """Embed x upward along the tower into the target model."""
    if x.model is target:
        return x
    chain = tower_chain(target)
    models = [root_model(target)] + [ext.extension for ext in chain]
    if x.model not in models:
        raise ValueError("no tower path from the element's model to the target")
    start = models.index(x.model)
    for ext in chain[start:]:
        x = ext.embed(x)
    return x


def val_root(x):
    """Valuation of x in units of the tower root's uniformizer (Fraction),
    or INF for zero."""
    v = x.valuation()
    if v == INF:
        return INF
    return Fraction(v, absolute_ramification(x.model))


class AbsValue:
    """|value| = |pi_root|^exponent; exponent INF encodes zero."""

    __slots__ = ("exponent",)

    def __init__(self, exponent):
        self.exponent = exponent if exponent == INF else Fraction(exponent)

    @classmethod
    def of(cls, x):
        return cls(val_root(x))

    def is_zero(self):
        return self.exponent == INF

    def __eq__(self, other):
        return isinstance(other, AbsValue) and self.exponent == other.exponent

    def __hash__(self):
        return hash(self.exponent)

    def __le__(self, other):
        # |x| <= |y| means the exponent is >= the other exponent
        return self.exponent >= other.exponent

    def __lt__(self, other):
        return self.exponent > other.exponent

    def __mul__(self, other):
        if self.is_zero() or other.is_zero():
            return AbsValue(INF)
        return AbsValue(self.exponent + other.exponent)

    def __repr__(self):
        return "AbsValue(0)" if self.is_zero() else f"AbsValue(q^-({self.exponent}))"

    def serialize(self):
        return "0" if self.is_zero() else str(self.exponent)


# ---------------------------------------------------------------------------
# sparse polynomials over a field model, variables keyed by (factor, j)
# ---------------------------------------------------------------------------

class Poly:
    """Sparse polynomial with FieldElement coefficients; variables are
    identified by arbitrary sortable keys such as (i, j)."""

    __slots__ = ("model", "terms")

    def __init__(self, model, terms=None):
        self.model = model
        self.terms = {}
        if terms:
            for exps, c in terms.items():
                if c.valuation() != INF:
                    self.terms[_norm_exps(exps)] = c

    @classmethod
    def const(cls, model, c):
        c = c if isinstance(c, FieldElement) else model.element(c)
        return cls(model, {(): c})

    @classmethod
    def var(cls, model, key):
        return cls(model, {((key, 1),): model.one()})

    def __add__(self, other):
        out = dict(self.terms)
        for e, c in other.terms.items():
            if e in out:
                s = out[e] + c
                if s.valuation() == INF:
                    del out[e]
                else:
                    out[e] = s
            else:
                out[e] = c
        return Poly(self.model, out)

    def __neg__(self):
        return Poly(self.model, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = _merge_exps(e1, e2)
                c = c1 * c2
                if e in out:
                    c = out[e] + c
                if c.valuation() == INF:
                    out.pop(e, None)
                else:
                    out[e] = c
        return Poly(self.model, out)

    def scale(self, c):
        c = c if isinstance(c, FieldElement) else self.model.element(c)
        return Poly(self.model, {e: coef * c for e, coef in self.terms.items()})

    def substitute(self, assign):
        """Substitute Poly values for variables (assign: key -> Poly)."""
        out = Poly.const(self.model, 0)
        for exps, c in self.terms.items():
            term = Poly.const(self.model, c)
            for key, n in exps:
                sub = assign[key]
                for _ in range(n):
                    term = term * sub
            out = out + term
        return out

    def evaluate(self, assign):
        """Evaluate at FieldElement values (assign: key -> FieldElement)."""
        acc = self.model.zero()
        for exps, c in self.terms.items():
            val = c
            for key, n in exps:
                val = val * assign[key] ** n
            acc = acc + val
        return acc

    def variables(self):
        keys = set()
        for exps in self.terms:
            for key, _n in exps:
                keys.add(key)
        return sorted(keys)

    def multidegree(self):
        deg = {}
        for exps in self.terms:
            for key, n in exps:
                deg[key] = max(deg.get(key, 0), n)
        return deg

    def __repr__(self):
        return f"Poly({self.terms!r})"


def _norm_exps(exps):
    return tuple(sorted((k, n) for k, n in exps if n))


def _merge_exps(e1, e2):
    d = dict(e1)
    for k, n in e2:
        d[k] = d.get(k, 0) + n
    return _norm_exps(d.items())


# ---------------------------------------------------------------------------
# rigid points
# ---------------------------------------------------------------------------

class RigidPoint:
    """K-rational point of a product of Drinfeld spaces, in affine
    coordinates (t_{i,0} = 1).  Validation checks the k_i-linear
    independence of {1, x_{i,1}, .., x_{i,d_i}} by exact expansion of K
    over k_i."""

    def __init__(self, descriptor, K, coords, validate=True):
        self.descriptor = descriptor
        self.K = K
        self.coords = tuple(tuple(K.element(c) if not isinstance(c, FieldElement)
                                  else c for c in factor) for factor in coords)
        if len(self.coords) != descriptor.r:
            raise ValueError("coordinate factor count mismatch")
        for (model, d), factor in zip(descriptor.factors, self.coords):
            if len(factor) != d:
                raise ValueError("coordinate count must equal the dimension")
        if validate:
            for i, (model, d) in enumerate(descriptor.factors):
                if not self._factor_independent(i):
                    raise ValueError(
                        f"factor {i}: coordinates lie on a rational hyperplane")

    def _factor_independent(self, i):
        model, d = self.descriptor.factors[i]
        vals = [self.K.one()] + list(self.coords[i])
        rows = [expand_over(v, model) for v in vals]
        return _rank_over(model, rows) == d + 1

    def value(self, i, j):
        """The coordinate value x_{i,j}, with x_{i,0} = 1."""
        return self.K.one() if j == 0 else self.coords[i][j - 1]

    def assignment(self):
        out = {}
        for i, (model, d) in enumerate(self.descriptor.factors):
            for j in range(d + 1):
                out[(i, j)] = self.value(i, j)
        return out

    def serialize(self):
        return [[self.K.elem_str(c) for c in factor] for factor in self.coords]


def _rank_over(model, rows):
    rows = [list(r) for r in rows]
    ncols = len(rows[0])
    rank = 0
    for col in range(ncols):
        piv = None
        for r in range(rank, len(rows)):
            if rows[r][col].valuation() != INF:
                piv = r
                break
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = model.one() / rows[rank][col]
        rows[rank] = [c * inv for c in rows[rank]]
        for r in range(len(rows)):
            if r != rank and rows[r][col].valuation() != INF:
                f = rows[r][col]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[rank])]
        rank += 1
    return rank


# ---------------------------------------------------------------------------
# seminorm evaluation and the Schneider-Stuhler filtration
# ---------------------------------------------------------------------------

def eval_abs(x, p):
    """|p(x)| for a polynomial in the T_{i,j} (or t_{i,j}) variables with
    coefficients in K, evaluated exactly."""
    assign = x.assignment()
    needed = set(p.variables())
    for key in needed:
        if key not in assign:
            raise ValueError(f"polynomial uses unknown variable {key}")
    return AbsValue.of(p.evaluate(assign))


def unimodular_representatives(model, n, dim):
    """Unimodular vectors over O/pi^n of length dim, normalized so the first
    unit coordinate is 1; exactly one representative per projective class."""
    reps = enumerate_residues(model, n)
    nonunits = [r for r in reps if r.valuation() == INF or r.valuation() >= 1]
    out = []
    for upos in range(dim):
        for head in product(nonunits, repeat=upos):
            for tail in product(reps, repeat=dim - upos - 1):
                out.append(head + (model.one(),) + tail)
    return out


def unimodular_count(q, n, dim):
    total = 0
    for upos in range(dim):
        total += (q ** (n - 1)) ** upos * (q ** n) ** (dim - upos - 1)
    return total


def omega_membership(x, n, closed=True, budget=200000):
    """x in X[n] (closed) or X(n) (strict): the defining inequality checked
    on all unimodular alpha per factor, enumerated modulo pi_i^n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    for i, (model, d) in enumerate(x.descriptor.factors):
        q = model.residue_size
        count = unimodular_count(q, n, d + 1)
        if count > budget:
            raise BudgetError(
                f"factor {i} needs {count} unimodular vectors (> budget {budget})")
        e_i = absolute_ramification(model)
        vals = [val_root(x.value(i, j)) for j in range(d + 1)]
        min_val = min(vals)
        bound = Fraction(n, e_i) + min_val
        for alpha in unimodular_representatives(model, n, d + 1):
            acc = x.K.zero()
            for j, a in enumerate(alpha):
                if a.valuation() != INF:
                    acc = acc + tower_embed(a, x.K) * x.value(i, j)
            v = val_root(acc)
            if closed:
                if not v <= bound:
                    return False
            else:
                if not v < bound:
                    return False
    return True


def membership_depth(x, max_n=3, budget=200000):
    """Smallest n with x in X[n], searched up to max_n; None if not found."""
    for n in range(1, max_n + 1):
        if omega_membership(x, n, closed=True, budget=budget):
            return n
    return None


def tau_coordinates(x):
    """The apartment point with exponents v_{k_i}(x_{i,j}): this is
    tau_Lambda(tau(x))."""
    factors = []
    for i, (model, d) in enumerate(x.descriptor.factors):
        e_i = absolute_ramification(model)
        exps = []
        for j in range(d + 1):
            v = val_root(x.value(i, j))
            if v == INF:
                raise ValueError("zero coordinate on a rigid point")
            exps.append(v * e_i)
        factors.append((None, tuple(exps)))
    return ApartmentPoint(factors)


# ---------------------------------------------------------------------------
# norm diagonalization
# ---------------------------------------------------------------------------

def diagonalize_norm(x, i, n, budget=200000, max_rounds=None):
    """A k_i-basis (v_0..v_d) and exponents making the restriction of the
    evaluation seminorm diagonal: |sum a_j v_j(x)| = max_j |a_j| |v_j(x)|,
    verified on all unimodular a mod pi_i^{n+1}.

    Greedy reduction: a violating combination replaces the basis vector
    attaining the minimum-valuation term; the X[n] certificate bounds the
    drop, so the loop terminates."""
    model, d = x.descriptor.factors[i]
    if not omega_membership(x, n, closed=True, budget=budget):
        retry = membership_depth(x, max_n=n + 3, budget=budget)
        hint = f"retry with depth {retry}" if retry else \
            f"no membership found up to depth {n + 3}"
        raise ValueError(f"certification depth insufficient: x not in X[{n}]; {hint}")
    q = model.residue_size
    count = unimodular_count(q, n + 1, d + 1)
    if count > budget:
        raise BudgetError(f"diagonalization needs {count} vectors (> budget)")
    e_i = absolute_ramification(model)
    e_K = absolute_ramification(x.K)
    basis = [[model.one() if k == j else model.zero() for k in range(d + 1)]
             for j in range(d + 1)]  # rows: coordinates of v_j in the T-basis
    values = [x.value(i, j) for j in range(d + 1)]
    if max_rounds is None:
        max_rounds = (d + 1) * (n + 2) * e_K * 4 + 16
    alphas = unimodular_representatives(model, n + 1, d + 1)
    pi = model.uniformizer()
    for _round in range(max_rounds):
        violation = None
        for alpha in alphas:
            acc = x.K.zero()
            vmin = INF
            jstar = None
            for j, a in enumerate(alpha):
                va = a.valuation()
                if va == INF:
                    continue
                term_val = Fraction(va) / e_i + val_root(values[j])
                acc = acc + tower_embed(a, x.K) * values[j]
                if term_val < vmin:
                    vmin = term_val
                    jstar = j
            if val_root(acc) > vmin:
                violation = (alpha, jstar)
                break
        if violation is None:
            exps = tuple(val_root(v) * e_i for v in values)
            return basis, exps
        alpha, jstar = violation
        astar = alpha[jstar]
        new_row = [model.zero()] * (d + 1)
        for j, a in enumerate(alpha):
            if a.valuation() == INF:
                continue
            c = a / astar
            for k in range(d + 1):
                new_row[k] = new_row[k] + c * basis[j][k]
        new_value = x.K.zero()
        for j, a in enumerate(alpha):
            if a.valuation() != INF:
                new_value = new_value + tower_embed(a / astar, x.K) * values[j]
        assert val_root(new_value) > val_root(values[jstar])
        # keep the coefficient row unimodular so the X[n] certificate keeps
        # bounding the values (termination argument)
        mv = min(c.valuation() for c in new_row if c.valuation() != INF)
        if mv:
            scale = pi ** (-mv)
            new_row = [c * scale for c in new_row]
            new_value = new_value * tower_embed(pi ** (-mv), x.K)
        basis[jstar] = new_row
        values[jstar] = new_value
    raise AssertionError("diagonalization did not terminate within the bound")


def verify_diagonal(x, i, basis, depth, budget=200000):
    """Independent re-verification of the diagonality property at the given
    depth: all unimodular a mod pi_i^{depth} satisfy the max-property."""
    model, d = x.descriptor.factors[i]
    e_i = absolute_ramification(model)
    values = []
    for j in range(d + 1):
        acc = x.K.zero()
        for k in range(d + 1):
            c = basis[j][k]
            if c.valuation() != INF:
                acc = acc + tower_embed(c, x.K) * x.value(i, k)
        values.append(acc)
    count = unimodular_count(model.residue_size, depth, d + 1)
    if count > budget:
        raise BudgetError(f"verification needs {count} vectors (> budget)")
    for alpha in unimodular_representatives(model, depth, d + 1):
        acc = x.K.zero()
        vmin = INF
        for j, a in enumerate(alpha):
            if a.valuation() == INF:
                continue
            acc = acc + tower_embed(a, x.K) * values[j]
            tv = Fraction(a.valuation()) / e_i + val_root(values[j])
            if tv < vmin:
                vmin = tv
        if val_root(acc) != vmin:
            return False
    return True


# ---------------------------------------------------------------------------
# Gauss seminorms
# ---------------------------------------------------------------------------

class GaussSeminorm:
    """Per factor: an apartment basis (None = standard, else a matrix over
    k_i whose columns express e_{i,k} in the T_{i,j} coordinates) and a
    rational exponent vector xi with rho(e_{i,k}) = |pi_root|^{xi_k}."""

    def __init__(self, descriptor, data):
        self.descriptor = descriptor
        self.data = tuple((basis, tuple(Fraction(v) for v in exps))
                          for basis, exps in data)

    @classmethod
    def from_apartment_point(cls, descriptor, point):
        data = []
        for (model, d), (basis, exps) in zip(descriptor.factors, point.factors):
            e_i = absolute_ramification(model)
            data.append((basis, tuple(Fraction(v) / e_i for v in exps)))
        return cls(descriptor, data)


def gauss_eval(b, p, K):
    """Exact max-of-monomials evaluation: substitute the linear change of
    basis, then take the max of |a_N| prod rho(e)^{n} over monomials."""
    descriptor = b.descriptor
    assign = {}
    exps_of = {}
    for i, ((model, d), (basis, exps)) in enumerate(zip(descriptor.factors, b.data)):
        for j in range(d + 1):
            if basis is None:
                assign[(i, j)] = Poly.var(K, ("e", i, j))
            else:
                acc = Poly.const(K, 0)
                for k in range(d + 1):
                    c = basis[j][k]
                    if c.valuation() != INF:
                        acc = acc + Poly.var(K, ("e", i, k)).scale(tower_embed(c, K))
                assign[(i, j)] = acc
        for k in range(d + 1):
            exps_of[("e", i, k)] = exps[k]
    q = p.substitute(assign)
    best = INF
    for mono, c in q.terms.items():
        v = val_root(c)
        if v == INF:
            continue
        for key, nn in mono:
            v += nn * exps_of[key]
        if v < best:
            best = v
    return AbsValue(best)


# ---------------------------------------------------------------------------
# deformation rho_t
# ---------------------------------------------------------------------------

def deform(x, t_exponent, p, i=0):
    """rho_t(p) = max_N t^{|N|} |D_N(p)(x)| for one factor, with t given as
    |pi_root|^{t_exponent} (t_exponent = 0 means t = 1; INF means t = 0).

    D_N(sum a_I x^I) = sum_{I >= N} prod C(i_k, n_k) a_I x^I."""
    if t_exponent != INF and t_exponent < 0:
        raise ValueError("t_exponent must be >= 0")
    model, d = x.descriptor.factors[i]
    keys = [(i, j) for j in range(1, d + 1)]
    deg = p.multidegree()
    ranges = [range(deg.get(k, 0) + 1) for k in keys]
    assign = x.assignment()
    best = INF
    for N in product(*ranges):
        if t_exponent == INF and any(N):
            continue
        acc = x.K.zero()
        for mono, c in p.terms.items():
            mexp = dict(mono)
            coeff = 1
            ok = True
            for key, nk in zip(keys, N):
                ik = mexp.get(key, 0)
                if ik < nk:
                    ok = False
                    break
                coeff *= math.comb(ik, nk)
            if not ok:
                continue
            term = c * x.K.element(coeff)
            if term.valuation() == INF:
                continue
            for key, nn in mono:
                term = term * assign[key] ** nn
            acc = acc + term
        v = val_root(acc)
        if v != INF and t_exponent != INF:
            v = v + t_exponent * sum(N)
        if v < best:
            best = v
    return AbsValue(best)


# ---------------------------------------------------------------------------
# dual coordinates on apartment points
# ---------------------------------------------------------------------------

def dual_coords(p, i):
    """Exponents of the dual coordinates s_{i,j} at a diagonal point:
    s_{i,j} = -t_{i,j}-exponent + t_{i,0}-exponent."""
    basis, exps = p.factors[i]
    if basis is not None:
        raise ValueError("dual coordinates are read off in the standard basis")
    return tuple(-(exps[j] - exps[0]) for j in range(len(exps)))
