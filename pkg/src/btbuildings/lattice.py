"""O_k-lattices in V = k^{d+1}: canonical forms, homothety classes, indices,
duals, labels, and residue-space neighbor enumeration.

A homothety class is stored through its primitive representative
(L <= O^n, L not <= pi O^n) in lower-triangular column-generator form:
column c has its first nonzero entry pi^{a_c} on the diagonal, and the
entry in row r > c is the canonical residue mod pi^{a_r}.  This form is
unique, hashable and cheap to produce.  The exposed canonical matrix
(`VertexClass.matrix()`) is the transposed, min-diagonal-0 rescaling of
the same data, which is what gets serialized.

Two arithmetic backends share one reduction algorithm: an exact one over
FieldElement fractions (used for arbitrary group elements, duals and
embeddings) and a fast one over pi-digit vectors (used for the neighbor
enumeration and ball construction hot paths).  Digit computations carry a
guard precision of 2*D+2 digits, D the determinant valuation, which makes
every pivot valuation and residue exact; the two backends are cross-checked
in the canonical-form stability suite.
"""

from functools import lru_cache

from .field import INF, FieldElement, LaurentModel, PAdicModel


# ---------------------------------------------------------------------------
# digit backends: elements of O/pi^M
# ---------------------------------------------------------------------------

class PadDigitOps:
    """O/p^M for the p-adic model; digit vectors are ints in [0, p^M)."""

    def __init__(self, model, M):
        self.model = model
        self.M = M
        self.p = model.p
        self.mod = model.p ** M
        self._inv_cache = {}

    def zero(self):
        return 0

    def from_field(self, x):
        digs = self.model.to_digits(x, self.M)
        acc = 0
        for d in reversed(digs):
            acc = acc * self.p + d
        return acc

    def to_field(self, a, shift=0):
        digs = []
        for _ in range(self.M):
            a, r = divmod(a, self.p)
            digs.append(r)
        return self.model.from_digits(digs, shift)

    def val(self, a):
        if a == 0:
            return self.M
        v = 0
        while a % self.p == 0:
            a //= self.p
            v += 1
        return v

    def add(self, a, b):
        return (a + b) % self.mod

    def sub(self, a, b):
        return (a - b) % self.mod

    def mul(self, a, b):
        return (a * b) % self.mod

    def shift_down(self, a, k):
        return a // (self.p ** k)

    def shift_up(self, a, k):
        return (a * self.p ** k) % self.mod

    def unit_inv(self, a):
        out = self._inv_cache.get(a)
        if out is None:
            out = self._inv_cache[a] = pow(a, -1, self.mod)
        return out

    def trunc(self, a, k):
        return a % (self.p ** k)

    def code(self, a, k):
        """Residue of a mod pi^k as an int in [0, q^k)."""
        return a % (self.p ** k)

    def from_code(self, code, k):
        return code % self.mod

    def residue_coeff(self, r):
        """Single residue-field digit -> digit vector."""
        return r


class LauDigitOps:
    """O/t^M for a Laurent model; digit vectors are tuples of GF ints, len M.
    Prime residue fields use direct mod-p arithmetic; prime powers go through
    the cached GF multiplication tables."""

    def __init__(self, model, M):
        self.model = model
        self.M = M
        self.gf = model.gf
        self.q = model.q
        self._zero = (0,) * M
        self._inv_cache = {}
        self._prime = self.gf.m == 1
        self._mt = None if self._prime else self.gf._mul_table

    def zero(self):
        return self._zero

    def from_field(self, x):
        return tuple(self.model.to_digits(x, self.M))

    def to_field(self, a, shift=0):
        return self.model.from_digits(list(a), shift)

    def val(self, a):
        for i, c in enumerate(a):
            if c:
                return i
        return self.M

    def add(self, a, b):
        if self._prime:
            p = self.q
            return tuple((x + y) % p for x, y in zip(a, b))
        gf = self.gf
        return tuple(gf.add(x, y) for x, y in zip(a, b))

    def sub(self, a, b):
        if self._prime:
            p = self.q
            return tuple((x - y) % p for x, y in zip(a, b))
        gf = self.gf
        return tuple(gf.sub(x, y) for x, y in zip(a, b))

    def mul(self, a, b):
        M = self.M
        out = [0] * M
        if self._prime:
            p = self.q
            for i, ai in enumerate(a):
                if ai:
                    top = M - i
                    for j, bj in enumerate(b[:top]):
                        if bj:
                            out[i + j] = (out[i + j] + ai * bj) % p
            return tuple(out)
        gf = self.gf
        mt = self._mt
        for i, ai in enumerate(a):
            if ai:
                row = mt[ai] if mt is not None else None
                top = M - i
                for j, bj in enumerate(b[:top]):
                    if bj:
                        prod = row[bj] if row is not None else gf.mul(ai, bj)
                        out[i + j] = gf.add(out[i + j], prod)
        return tuple(out)

    def shift_down(self, a, k):
        return a[k:] + (0,) * k

    def shift_up(self, a, k):
        return (0,) * k + a[: self.M - k]

    def unit_inv(self, a):
        out = self._inv_cache.get(a)
        if out is not None:
            return out
        gf = self.gf
        M = self.M
        inv0 = gf.inv(a[0])
        series = [inv0] + [0] * (M - 1)
        for i in range(1, M):
            acc = 0
            for j in range(1, i + 1):
                if a[j] and series[i - j]:
                    acc = gf.add(acc, gf.mul(a[j], series[i - j]))
            series[i] = gf.neg(gf.mul(inv0, acc))
        out = tuple(series)
        self._inv_cache[a] = out
        return out

    def trunc(self, a, k):
        return a[:k] + (0,) * (self.M - k)

    def code(self, a, k):
        acc = 0
        for c in reversed(a[:k]):
            acc = acc * self.q + c
        return acc

    def from_code(self, code, k):
        digs = []
        for _ in range(min(k, self.M)):
            code, r = divmod(code, self.q)
            digs.append(r)
        return tuple(digs) + (0,) * (self.M - len(digs))

    def residue_coeff(self, r):
        return (r,) + (0,) * (self.M - 1)


def digit_ops(model, M):
    if isinstance(model, PAdicModel):
        return PadDigitOps(model, M)
    return LauDigitOps(model, M)


# ---------------------------------------------------------------------------
# the shared triangular reduction
# ---------------------------------------------------------------------------

def _triangularize_digits(ops, cols, n):
    """Column reduction over O/pi^M.  cols: list of columns (lists of digit
    vectors, length n).  Returns (exps, lower) of the canonical primitive
    lower-triangular form; the global pi-shift applied is returned too.

    Requires that the guard precision of ops exceeds twice the determinant
    valuation of the primitive lattice (asserted on every pivot)."""
    M = ops.M
    # primitive scaling: shift down by the minimal entry valuation
    minval = min(ops.val(v) for col in cols for v in col)
    assert minval < M, "zero matrix or precision exhausted"
    if minval:
        cols = [[ops.shift_down(v, minval) for v in col] for col in cols]
    remaining = list(cols)
    pivots = []
    exps = []
    for r in range(n):
        best = None
        bestval = None
        for idx, col in enumerate(remaining):
            v = ops.val(col[r])
            if bestval is None or v < bestval:
                best, bestval = idx, v
        assert bestval is not None and bestval < M, "singular generator matrix"
        piv = remaining.pop(best)
        a = bestval
        unit = ops.shift_down(piv[r], a)
        uinv = ops.unit_inv(unit)
        piv = [ops.mul(uinv, v) for v in piv]
        for col in remaining:
            v = ops.val(col[r])
            if v >= M:
                continue
            mu = ops.shift_down(col[r], a)
            for i in range(r, n):
                col[i] = ops.sub(col[i], ops.mul(mu, piv[i]))
        pivots.append(piv)
        exps.append(a)
    # back-reduction: entry (row i, col c) for i > c reduced mod pi^{a_i}
    for c in range(n):
        col = pivots[c]
        for i in range(c + 1, n):
            a_i = exps[i]
            resid = ops.trunc(col[i], a_i)
            mu = ops.shift_down(ops.sub(col[i], resid), a_i)
            if ops.val(mu) < M:
                ref = pivots[i]
                for k in range(i, n):
                    col[k] = ops.sub(col[k], ops.mul(mu, ref[k]))
            col[i] = resid
    lower = tuple(tuple(ops.code(pivots[c][i], exps[i]) for i in range(c + 1, n))
                  for c in range(n))
    return tuple(exps), lower, minval


def _triangularize_exact(model, cols, n):
    """Same reduction over exact FieldElements.  cols: list of columns of
    FieldElements.  Returns (exps, lower codes, shift)."""
    pi = model.uniformizer()
    minval = min((v.valuation() for col in cols for v in col))
    assert minval != INF, "zero matrix"
    if minval:
        scale = pi ** (-minval)
        cols = [[v * scale for v in col] for col in cols]
    else:
        cols = [list(col) for col in cols]
    remaining = cols
    pivots = []
    exps = []
    for r in range(n):
        best = None
        bestval = INF
        for idx, col in enumerate(remaining):
            v = col[r].valuation()
            if v < bestval:
                best, bestval = idx, v
        if best is None or bestval == INF:
            raise ValueError("singular matrix")
        piv = remaining.pop(best)
        a = bestval
        uinv = pi ** a / piv[r]
        piv = [v * uinv for v in piv]
        for col in remaining:
            if col[r].valuation() == INF:
                continue
            mu = col[r] / piv[r]
            for i in range(r, n):
                col[i] = col[i] - mu * piv[i]
        pivots.append(piv)
        exps.append(a)
    for c in range(n):
        col = pivots[c]
        for i in range(c + 1, n):
            a_i = exps[i]
            digs = model.to_digits(col[i], a_i)
            resid = model.from_digits(digs)
            mu = (col[i] - resid) / (pi ** a_i)
            if mu.valuation() != INF:
                ref = pivots[i]
                for k in range(i, n):
                    col[k] = col[k] - mu * ref[k]
            col[i] = resid
    q = model.residue_size

    def code_of(x, k):
        digs = model.to_digits(x, k)
        acc = 0
        for d in reversed(digs):
            acc = acc * q + d
        return acc

    lower = tuple(tuple(code_of(pivots[c][i], exps[i]) for i in range(c + 1, n))
                  for c in range(n))
    return tuple(exps), lower, minval


# ---------------------------------------------------------------------------
# vertex classes
# ---------------------------------------------------------------------------

class VertexClass:
    """Canonical representative of a lattice homothety class."""

    __slots__ = ("model", "n", "exps", "lower", "_hash")

    def __init__(self, model, exps, lower):
        self.model = model
        self.n = len(exps)
        self.exps = exps      # primitive diagonal exponents, all >= 0
        self.lower = lower    # lower[c][i-c-1] = residue code of entry (row i, col c)
        self._hash = hash((model.key(), exps, lower))

    def __eq__(self, other):
        return (isinstance(other, VertexClass) and self.model is other.model
                and self.exps == other.exps and self.lower == other.lower)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"VertexClass(exps={self.exps}, lower={self.lower})"

    def sort_key(self):
        return (self.exps, self.lower)

    @property
    def dim(self):
        return self.n - 1

    def det_valuation(self):
        """Valuation of det of the primitive representative (= colength in O^n)."""
        return sum(self.exps)

    def label(self):
        """Residue of v(det) mod (d+1); invariant under homothety."""
        return self.det_valuation() % self.n

    @property
    def exponents(self):
        """Diagonal exponents of the exposed min-diag-0 canonical matrix."""
        m = min(self.exps)
        return tuple(a - m for a in self.exps)

    def is_diagonal(self):
        return all(code == 0 for col in self.lower for code in col)

    def diagonal_exponents(self):
        if not self.is_diagonal():
            return None
        return self.exponents

    # -- materializations --

    def primitive_matrix(self):
        """Lower-triangular FieldElement matrix whose columns generate the
        primitive representative; entry (i,c), i>c, is an O-residue."""
        model = self.model
        pi = model.uniformizer()
        n = self.n
        mat = [[model.zero() for _ in range(n)] for _ in range(n)]
        for c in range(n):
            mat[c][c] = pi ** self.exps[c]
            for i in range(c + 1, n):
                mat[i][c] = self._decode(self.lower[c][i - c - 1], self.exps[i])
        return mat

    def matrix(self):
        """The canonical matrix: upper-triangular, diagonal pi^{a_j} with
        min_j a_j = 0, entry (i,j), i<j, a canonical residue mod pi^{a_j}."""
        model = self.model
        pi = model.uniformizer()
        m = min(self.exps)
        scale = pi ** (-m) if m else None
        prim = self.primitive_matrix()
        n = self.n
        out = [[prim[j][i] for j in range(n)] for i in range(n)]  # transpose
        if scale is not None:
            out = [[x * scale for x in row] for row in out]
        return out

    def _decode(self, code, k):
        model = self.model
        q = model.residue_size
        digs = []
        for _ in range(k):
            code, r = divmod(code, q)
            digs.append(r)
        return model.from_digits(digs)

    def serialize(self):
        """Row-major list of element strings of the canonical matrix."""
        return [self.model.elem_str(x) for row in self.matrix() for x in row]

    def digit_columns(self, ops):
        """Primitive columns in the digit backend (for the hot paths)."""
        n = self.n
        cols = []
        for c in range(n):
            col = [ops.zero()] * n
            col[c] = ops.shift_up(ops.residue_coeff(1), self.exps[c]) \
                if self.exps[c] else ops.residue_coeff(1)
            for i in range(c + 1, n):
                col[i] = ops.from_code(self.lower[c][i - c - 1], self.exps[i])
            cols.append(col)
        return cols


class Lattice:
    """A full-rank O_k-lattice given by an invertible column-basis matrix."""

    __slots__ = ("model", "n", "basis")

    def __init__(self, model, basis):
        self.model = model
        self.n = len(basis)
        cols = [[model.element(basis[i][j]) if not isinstance(basis[i][j], FieldElement)
                 else basis[i][j] for j in range(self.n)] for i in range(self.n)]
        if det_valuation_exact(model, cols) == INF:
            raise ValueError("singular basis matrix")
        self.basis = tuple(tuple(row) for row in cols)

    def vertex_class(self):
        return canonical_form(self.model, self.basis)

    def det_valuation(self):
        return det_valuation_exact(self.model, [list(r) for r in self.basis])

    def __eq__(self, other):
        # equality of lattices (not classes): mutual containment
        return (isinstance(other, Lattice) and self.model is other.model
                and _contains(self, other) and _contains(other, self))

    def __hash__(self):
        raise TypeError("Lattice is not hashable; use vertex_class()")


def det_exact(model, mat):
    n = len(mat)
    if n == 1:
        return mat[0][0]
    out = model.zero()
    sign = 1
    for j in range(n):
        minor = [[mat[i][k] for k in range(n) if k != j] for i in range(1, n)]
        term = mat[0][j] * det_exact(model, minor)
        out = out + term if sign > 0 else out - term
        sign = -sign
    return out


def det_valuation_exact(model, mat):
    return det_exact(model, mat).valuation()


def canonical_form(model, basis):
    """Canonical homothety-class representative of the lattice whose columns
    are `basis` (FieldElements or parseable strings); errors on singular."""
    n = len(basis)
    cols = []
    for j in range(n):
        col = []
        for i in range(n):
            x = basis[i][j]
            col.append(x if isinstance(x, FieldElement) else model.element(x))
        cols.append(col)
    if det_valuation_exact(model, [[cols[j][i] for j in range(n)] for i in range(n)]) == INF:
        raise ValueError("singular matrix")
    exps, lower, _ = _triangularize_exact(model, cols, n)
    return VertexClass(model, exps, lower)


def vertex_from_diagonal(model, exps):
    """Class of the diagonal lattice <pi^{e_0} T_0, .., pi^{e_n} T_n>."""
    m = min(exps)
    prim = tuple(e - m for e in exps)
    n = len(exps)
    return VertexClass(model, prim, tuple((0,) * (n - c - 1) for c in range(n)))


def standard_vertex(model, n):
    return vertex_from_diagonal(model, (0,) * n)


# ---------------------------------------------------------------------------
# index, dual, label
# ---------------------------------------------------------------------------

def _contains(M, L):
    """M >= L for Lattice instances (exact solve)."""
    from .field import _solve_linear
    model = M.model
    n = M.n
    mat = [list(r) for r in M.basis]
    for j in range(n):
        rhs = [L.basis[i][j] for i in range(n)]
        x = _solve_linear(model, mat, rhs)
        for c in x:
            if c.valuation() != INF and c.valuation() < 0:
                return False
    return True


def index(M, L):
    """Length of M/L over O_k; requires M >= L (checked)."""
    if not _contains(M, L):
        raise ValueError("containment failure: M does not contain L")
    v = L.det_valuation() - M.det_valuation()
    assert v >= 0 and v != INF
    return v


def dual(v):
    """Class of the dual lattice for the standard bilinear form sum a_j b_j."""
    from .field import _solve_linear
    model = v.model
    n = v.n
    prim = v.primitive_matrix()
    # dual basis: columns of (A^T)^{-1}
    at = [[prim[j][i] for j in range(n)] for i in range(n)]
    cols = []
    for j in range(n):
        rhs = [model.one() if i == j else model.zero() for i in range(n)]
        cols.append(_solve_linear(model, [row[:] for row in at], rhs))
    basis = [[cols[j][i] for j in range(n)] for i in range(n)]
    return canonical_form(model, basis)


def label(v):
    return v.label()


# ---------------------------------------------------------------------------
# residue subspace enumeration and neighbors
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def gaussian_binomial(n, w, q):
    """Number of w-codimensional subspaces of F_q^n."""
    if w < 0 or w > n:
        return 0
    num = 1
    den = 1
    for i in range(1, w + 1):
        num *= q ** (n - w + i) - 1
        den *= q ** i - 1
    assert num % den == 0
    return num // den


@lru_cache(maxsize=None)
def subspace_rrefs(q, n, k):
    """All dimension-k subspaces of F_q^n as reduced row-echelon bases,
    deterministically ordered (pivot set lexicographic, then free entries in
    counting order).  Rows are tuples of GF ints."""
    from itertools import combinations
    from .gf import GF
    gf = GF.get(q)
    out = []
    for pivots in combinations(range(n), k):
        free_pos = []
        for r, p in enumerate(pivots):
            for j in range(p + 1, n):
                if j not in pivots:
                    free_pos.append((r, j))
        nfree = len(free_pos)
        for code in range(q ** nfree):
            rows = [[0] * n for _ in range(k)]
            for r, p in enumerate(pivots):
                rows[r][p] = 1
            c = code
            for (r, j) in free_pos:
                c, val = divmod(c, q)
                rows[r][j] = val
            out.append(tuple(tuple(r) for r in rows))
    assert len(out) == gaussian_binomial(n, n - k, q)
    return tuple(out)


def neighbors_by_colength(v, w, ops=None):
    """All classes [L'] with L > L' > pi L of colength w, in deterministic
    (subspace-enumeration) order.  Count is the Gaussian binomial C(d+1,w)_q."""
    n = v.n
    if not 1 <= w <= n - 1:
        raise ValueError(f"colength must be in 1..{n - 1}, got {w}")
    model = v.model
    q = model.residue_size
    k = n - w
    D_new = v.det_valuation() + w
    if ops is None or ops.M < 2 * D_new + 2:
        ops = digit_ops(model, 2 * D_new + 2)
    tcols = v.digit_columns(ops)
    out = []
    for rref in subspace_rrefs(q, n, k):
        gens = []
        for row in rref:
            col = [ops.zero()] * n
            for c, coeff in enumerate(row):
                if coeff:
                    src = tcols[c]
                    lifted = ops.residue_coeff(coeff)
                    for i in range(n):
                        if ops.val(src[i]) < ops.M:
                            col[i] = ops.add(col[i], ops.mul(lifted, src[i]))
            gens.append(col)
        for c in range(n):
            gens.append([ops.shift_up(x, 1) for x in tcols[c]])
        exps, lower, _ = _triangularize_digits(ops, gens, n)
        out.append(VertexClass(model, exps, lower))
    return out


def all_neighbors(v, ops=None):
    """Sublattice neighbors of all colengths 1..d, deterministic order."""
    out = []
    for w in range(1, v.n):
        out.extend(neighbors_by_colength(v, w, ops=ops))
    return out


# ---------------------------------------------------------------------------
# fast class-pair arithmetic used by the building layer
# ---------------------------------------------------------------------------

def solve_in_basis_valuations(v, targets=None, ops=None):
    """Valuation matrix of T^{-1} (T the primitive column matrix of v):
    entry [i][j] = v((T^{-1})_{ij}), or the valuations of T^{-1}*target
    columns when targets (digit columns) are given.  Values are exact."""
    model = v.model
    n = v.n
    D = v.det_valuation()
    if ops is None:
        bound = 2 * D + 2
        if targets is not None:
            bound = 2 * (D + max((_col_maxval(c) for c in targets), default=0)) + 2
        ops = digit_ops(model, bound)
    tcols = v.digit_columns(ops)
    if targets is None:
        targets = []
        for j in range(n):
            col = [ops.zero()] * n
            col[j] = ops.residue_coeff(1)
            targets.append(col)
    vals = []
    for col in targets:
        y = _forward_solve_scaled(ops, tcols, col, D)
        vals.append([ops.val(yi) - D if ops.val(yi) < ops.M else INF for yi in y])
    return [[vals[j][i] for j in range(len(targets))] for i in range(n)]


def _col_maxval(col):
    return 0


def _forward_solve_scaled(ops, tcols, b, D):
    """Solve T y = pi^D b by forward substitution; returns digit vector of y
    (y is integral because pi^D T^{-1} has O entries)."""
    n = len(tcols)
    b = [ops.shift_up(x, D) if ops.val(x) < ops.M else x for x in b]
    y = [ops.zero()] * n
    for i in range(n):
        acc = b[i]
        for k in range(i):
            if ops.val(y[k]) < ops.M and ops.val(tcols[k][i]) < ops.M:
                acc = ops.sub(acc, ops.mul(tcols[k][i], y[k]))
        a_i = ops.val(tcols[i][i])
        unit = ops.shift_down(tcols[i][i], a_i)
        if ops.val(acc) < a_i:
            raise ArithmeticError("non-integral forward solve")
        y[i] = ops.mul(ops.unit_inv(unit), ops.shift_down(acc, a_i))
    return y


def class_pair_min_valuation(x, y):
    """min over entries of v(T_x^{-1} T_y), for the primitive representatives.
    This is -c where pi^c L_y <= L_x is the minimal containment shift."""
    model = x.model
    Dx, Dy = x.det_valuation(), y.det_valuation()
    ops = digit_ops(model, 2 * (Dx + Dy) + 4)
    ty = y.digit_columns(ops)
    vals = solve_in_basis_valuations(x, targets=ty, ops=ops)
    return min(v for row in vals for v in row)


def pair_index_normalized(x, y):
    """f(x,y) = [M:L] where M is x's lattice and L is y's scaled so that
    M >= L, pi M not >= L (the directed distance in one factor)."""
    c = -class_pair_min_valuation(x, y)
    return x.n * c + y.det_valuation() - x.det_valuation()


def adjacent(x, y):
    """Undirected 1-skeleton adjacency: some representatives satisfy
    L_x > L_y > pi L_x."""
    if x == y:
        return False
    fxy = pair_index_normalized(x, y)
    fyx = pair_index_normalized(y, x)
    return fxy + fyx == x.n
