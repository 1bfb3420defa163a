"""Exact models of non-Archimedean local fields at desk scale.

Two global models stand in for the complete fields: Q with the p-adic
valuation, and F_q(t) with the t-adic valuation.  Every computation in
this package touches only finitely many digits, so exactness is
preserved with no precision management.

Laurent-model elements are reduced ratios of polynomials over F_q with
a monic denominator; p-adic elements are Fractions.  Equal-characteristic
extensions F_{q^f}(s), s^e = t, are themselves Laurent models and carry
a pointer to their base, so elements can be embedded upward and expanded
downward exactly.
"""

import math
from fractions import Fraction
from functools import lru_cache

from .gf import GF

INF = math.inf

_EXT_VARS = ("t", "s", "u", "v", "z")


# ---------------------------------------------------------------------------
# polynomials over GF(q): tuples (c_0, c_1, ..) of GF ints, trimmed
# ---------------------------------------------------------------------------

def ptrim(c):
    i = len(c)
    while i and c[i - 1] == 0:
        i -= 1
    return tuple(c[:i])


def padd(gf, a, b):
    n = max(len(a), len(b))
    return ptrim([gf.add(a[i] if i < len(a) else 0, b[i] if i < len(b) else 0)
                  for i in range(n)])


def pneg(gf, a):
    return tuple(gf.neg(c) for c in a)


def psub(gf, a, b):
    return padd(gf, a, pneg(gf, b))


def pmul(gf, a, b):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = gf.add(out[i + j], gf.mul(ai, bj))
    return ptrim(out)


def pdivmod(gf, a, b):
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    binv = gf.inv(b[-1])
    a = list(a)
    q = [0] * max(0, len(a) - len(b) + 1)
    while len(a) >= len(b):
        c = gf.mul(a[-1], binv)
        k = len(a) - len(b)
        if c:
            q[k] = c
            for i, bi in enumerate(b):
                a[k + i] = gf.sub(a[k + i], gf.mul(c, bi))
        a.pop()
    return ptrim(q), ptrim(a)


def pgcd(gf, a, b):
    while b:
        a, b = b, pdivmod(gf, a, b)[1]
    if a:
        lead_inv = gf.inv(a[-1])
        a = tuple(gf.mul(c, lead_inv) for c in a)  # monic
    return a


def pord(a):
    """Index of the first nonzero coefficient; INF for the zero polynomial."""
    for i, c in enumerate(a):
        if c:
            return i
    return INF


# ---------------------------------------------------------------------------
# field models
# ---------------------------------------------------------------------------

class PAdicModel:
    """Q with the p-adic valuation, standing in for Q_p."""

    kind = "padic"
    _cache = {}

    @classmethod
    def get(cls, p):
        m = cls._cache.get(p)
        if m is None:
            m = cls._cache[p] = cls(p)
        return m

    def __init__(self, p):
        from .gf import is_prime
        if not is_prime(p):
            raise ValueError(f"p must be prime, got {p}")
        self.p = p
        self.residue_size = p
        self.tower = None

    def key(self):
        return ("padic", self.p)

    def __repr__(self):
        return f"PAdicModel({self.p})"

    def element(self, value):
        if isinstance(value, FieldElement):
            if value.model is not self:
                raise ValueError("element of a different model")
            return value
        if isinstance(value, str):
            return FieldElement(self, Fraction(value))
        return FieldElement(self, Fraction(value))

    def zero(self):
        return self.element(0)

    def one(self):
        return self.element(1)

    def uniformizer(self):
        return self.element(self.p)

    def val(self, raw):
        if raw == 0:
            return INF
        num, den = raw.numerator, raw.denominator
        v = 0
        while num % self.p == 0:
            num //= self.p
            v += 1
        while den % self.p == 0:
            den //= self.p
            v -= 1
        return v

    def to_digits(self, x, n):
        """First n base-p digits of x (requires v(x) >= 0)."""
        raw = x.raw
        if raw != 0 and self.val(raw) < 0:
            raise ValueError("negative valuation, not in O")
        mod = self.p ** n
        a = raw.numerator % mod
        b = pow(raw.denominator % mod, -1, mod)
        val = (a * b) % mod
        out = []
        for _ in range(n):
            val, r = divmod(val, self.p)
            out.append(r)
        return out

    def from_digits(self, digits, shift=0):
        acc = 0
        for d in reversed(digits):
            acc = acc * self.p + d
        return FieldElement(self, Fraction(acc) * Fraction(self.p) ** shift)

    def elem_str(self, x):
        return str(x.raw)

    def elem_parse(self, s):
        return FieldElement(self, Fraction(s.replace(" ", "")))

    def residue_gf(self):
        return GF.get(self.p)

    def residue_of_unit(self, x):
        """Image in the residue field of an element with v >= 0."""
        return self.to_digits(x, 1)[0]

    def lift_residue(self, r):
        return self.element(r)


class LaurentModel:
    """F_q(t) with the t-adic valuation, standing in for F_q((t))."""

    kind = "laurent"
    _cache = {}

    @staticmethod
    def _tower_key(tower):
        if tower is None:
            return None
        if tower[0] == "helper":
            return ("helper", tower[1])
        return tower[0].key() + (tower[1], tower[2])

    @classmethod
    def get(cls, q, var="t", tower=None):
        key = (q, var, cls._tower_key(tower))
        m = cls._cache.get(key)
        if m is None:
            m = cls._cache[key] = cls(q, var, tower)
        return m

    def __init__(self, q, var="t", tower=None):
        self.gf = GF.get(q)
        self.q = q
        self.residue_size = q
        self.var = var
        self.tower = tower  # None, or (base_model, e, f)

    def key(self):
        return ("laurent", self.q, self.var, self._tower_key(self.tower))

    def __repr__(self):
        return f"LaurentModel(q={self.q}, var={self.var!r})"

    def element(self, num, den=(1,)):
        if isinstance(num, FieldElement):
            if num.model is not self:
                raise ValueError("element of a different model")
            return num
        if isinstance(num, str):
            return self.elem_parse(num)
        if isinstance(num, int):
            num = (self.gf.scalar(num),) if num % self.gf.p else ()
        num, den = self._reduce(tuple(num), tuple(den))
        return FieldElement(self, (num, den))

    def _reduce(self, num, den):
        gf = self.gf
        num, den = ptrim(num), ptrim(den)
        if not den:
            raise ZeroDivisionError("zero denominator")
        if not num:
            return (), (1,)
        g = pgcd(gf, num, den)
        if len(g) > 1 or g[0] != 1:
            num = pdivmod(gf, num, g)[0]
            den = pdivmod(gf, den, g)[0]
        lead_inv = gf.inv(den[-1])
        if lead_inv != 1:
            num = tuple(gf.mul(c, lead_inv) for c in num)
            den = tuple(gf.mul(c, lead_inv) for c in den)
        return num, den

    def zero(self):
        return FieldElement(self, ((), (1,)))

    def one(self):
        return FieldElement(self, ((1,), (1,)))

    def uniformizer(self):
        return FieldElement(self, ((0, 1), (1,)))

    def val(self, raw):
        num, den = raw
        if not num:
            return INF
        return pord(num) - pord(den)

    def to_digits(self, x, n):
        """First n t-adic digits of x (requires v(x) >= 0); GF ints."""
        num, den = x.raw
        if not num:
            return [0] * n
        if pord(num) < pord(den):
            raise ValueError("negative valuation, not in O")
        k = pord(den)
        num = num[k:] if k else num
        den = den[k:] if k else den
        gf = self.gf
        inv0 = gf.inv(den[0])
        series = [0] * n
        for i in range(n):
            acc = num[i] if i < len(num) else 0
            for j in range(1, min(i, len(den) - 1) + 1):
                acc = gf.sub(acc, gf.mul(den[j], series[i - j]))
            series[i] = gf.mul(acc, inv0)
        return series

    def from_digits(self, digits, shift=0):
        num = ptrim(digits)
        if shift >= 0:
            return self.element((0,) * shift + num)
        den = (0,) * (-shift) + (1,)
        return self.element(num, den)

    def elem_str(self, x):
        num, den = x.raw
        ns = self._poly_str(num)
        if den == (1,):
            return ns
        return f"({ns})/({self._poly_str(den)})"

    def _poly_str(self, pol):
        gf = self.gf
        if not pol:
            return "0"
        terms = []
        for k, c in enumerate(pol):
            if c == 0:
                continue
            for a, cw in enumerate(gf.to_coeffs(c)):
                if cw == 0:
                    continue
                parts = []
                if cw != 1 or (a == 0 and k == 0):
                    parts.append(str(cw))
                if a == 1:
                    parts.append("w")
                elif a > 1:
                    parts.append(f"w^{a}")
                if k == 1:
                    parts.append(self.var)
                elif k > 1:
                    parts.append(f"{self.var}^{k}")
                terms.append("*".join(parts) if parts else "1")
        return "+".join(terms) if terms else "0"

    def elem_parse(self, s):
        s = s.replace(" ", "")
        if not s:
            raise ValueError("empty element")
        num_s, den_s = s, None
        depth = 0
        for i, ch in enumerate(s):
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
            elif ch == "/" and depth == 0:
                num_s, den_s = s[:i], s[i + 1:]
                break
        num = self._poly_parse(num_s)
        den = self._poly_parse(den_s) if den_s is not None else (1,)
        return self.element(num, den)

    def _poly_parse(self, s):
        gf = self.gf
        if s.startswith("(") and s.endswith(")"):
            depth = 0
            ok = True
            for i, ch in enumerate(s):
                if ch == "(":
                    depth += 1
                elif ch == ")":
                    depth -= 1
                    if depth == 0 and i != len(s) - 1:
                        ok = False
                        break
            if ok:
                s = s[1:-1]
        coeffs = {}
        for term in s.split("+"):
            if not term:
                raise ValueError("empty term")
            cw, wexp, texp = 1, 0, 0
            for part in term.split("*"):
                if not part:
                    raise ValueError(f"bad term {term!r}")
                if part[0].isdigit():
                    cw = gf.mul(cw, gf.scalar(int(part)))
                elif part[0] == "w":
                    wexp += int(part[2:]) if part.startswith("w^") else 1
                elif part[0] == self.var:
                    texp += int(part[2:]) if part.startswith(f"{self.var}^") else 1
                else:
                    raise ValueError(f"bad factor {part!r} in {term!r}")
            c = gf.mul(cw, gf.pow(gf.from_coeffs([0, 1]), wexp)) if wexp else cw
            coeffs[texp] = gf.add(coeffs.get(texp, 0), c)
        if not coeffs:
            return ()
        out = [0] * (max(coeffs) + 1)
        for k, c in coeffs.items():
            out[k] = c
        return ptrim(out)

    def residue_gf(self):
        return self.gf

    def residue_of_unit(self, x):
        return self.to_digits(x, 1)[0]

    def lift_residue(self, r):
        return self.element((r,)) if r else self.zero()


# ---------------------------------------------------------------------------
# field elements
# ---------------------------------------------------------------------------

class FieldElement:
    """Immutable element of a field model, stored in reduced canonical form."""

    __slots__ = ("model", "raw")

    def __init__(self, model, raw):
        self.model = model
        self.raw = raw

    def __repr__(self):
        return f"<{self.model.elem_str(self)}>"

    def __str__(self):
        return self.model.elem_str(self)

    def __eq__(self, other):
        return (isinstance(other, FieldElement) and self.model is other.model
                and self.raw == other.raw)

    def __hash__(self):
        return hash((self.model.key(), self.raw))

    def __bool__(self):
        return self.valuation() != INF

    def valuation(self):
        return self.model.val(self.raw)

    def __add__(self, other):
        m = self.model
        if isinstance(m, PAdicModel):
            return FieldElement(m, self.raw + other.raw)
        (a, b), (c, d) = self.raw, other.raw
        gf = m.gf
        return m.element(padd(gf, pmul(gf, a, d), pmul(gf, c, b)), pmul(gf, b, d))

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        m = self.model
        if isinstance(m, PAdicModel):
            return FieldElement(m, -self.raw)
        (a, b) = self.raw
        return FieldElement(m, (pneg(m.gf, a), b))

    def __mul__(self, other):
        m = self.model
        if isinstance(m, PAdicModel):
            return FieldElement(m, self.raw * other.raw)
        (a, b), (c, d) = self.raw, other.raw
        gf = m.gf
        return m.element(pmul(gf, a, c), pmul(gf, b, d))

    def __truediv__(self, other):
        m = self.model
        if isinstance(m, PAdicModel):
            return FieldElement(m, self.raw / other.raw)
        (a, b), (c, d) = self.raw, other.raw
        if not c:
            raise ZeroDivisionError("division by zero")
        gf = m.gf
        return m.element(pmul(gf, a, d), pmul(gf, b, c))

    def __pow__(self, n):
        m = self.model
        out = m.one()
        b = self
        if n < 0:
            b = m.one() / b
            n = -n
        while n:
            if n & 1:
                out = out * b
            b = b * b
            n >>= 1
        return out

    def sort_key(self):
        if isinstance(self.model, PAdicModel):
            return (0, self.raw.numerator, self.raw.denominator)
        return (1, self.raw)


# ---------------------------------------------------------------------------
# spec operations
# ---------------------------------------------------------------------------

def valuation(x):
    """Normalized discrete valuation; v(0) = +inf, v(uniformizer) = 1."""
    return x.valuation()


def enumerate_residues(model, m):
    """The q^m canonical representatives of O/pi^m O, in counting order:
    representative i has the base-q digits of i as its pi-digits."""
    if m < 1:
        raise ValueError("m must be >= 1")
    q = model.residue_size
    out = []
    for code in range(q ** m):
        digits = []
        c = code
        for _ in range(m):
            c, r = divmod(c, q)
            digits.append(r)
        out.append(model.from_digits(digits))
    return out


class ExtensionDescriptor:
    """Equal-characteristic extension of a Laurent model: residue degree f,
    ramification index e, uniformizer s with s^e = t."""

    _cache = {}

    def __new__(cls, base, e=1, f=1, var=None):
        if isinstance(base, PAdicModel):
            raise ValueError("extensions are unsupported in the p-adic model")
        key = (base.key(), e, f, var)
        inst = cls._cache.get(key)
        if inst is not None:
            return inst
        inst = super().__new__(cls)
        cls._cache[key] = inst
        return inst

    def __init__(self, base, e=1, f=1, var=None):
        if getattr(self, "_ready", False):
            return
        if e < 1 or f < 1:
            raise ValueError("e and f must be >= 1")
        self.base = base
        self.e = e
        self.f = f
        if var is None:
            try:
                i = _EXT_VARS.index(base.var)
            except ValueError:
                i = 0
            var = _EXT_VARS[i + 1] if i + 1 < len(_EXT_VARS) else base.var + "'"
        self.extension = LaurentModel.get(base.q ** f, var=var, tower=(base, e, f))
        self._coef_emb = base.gf.embedding_into(self.extension.gf)
        self._ready = True

    @property
    def degree(self):
        return self.e * self.f

    def __repr__(self):
        return f"ExtensionDescriptor({self.base!r}, e={self.e}, f={self.f})"

    def embed_poly(self, pol):
        """t-polynomial over F_q  ->  s-polynomial over F_{q^f}, t -> s^e."""
        if not pol:
            return ()
        out = [0] * ((len(pol) - 1) * self.e + 1)
        for k, c in enumerate(pol):
            if c:
                out[k * self.e] = self._coef_emb[c]
        return tuple(out)

    def embed(self, x):
        """Ring homomorphism scaling valuations by e."""
        if x.model is not self.base:
            raise ValueError("element not of the base model")
        num, den = x.raw
        return self.extension.element(self.embed_poly(num), self.embed_poly(den))

    # -- descent: exact coordinates of an extension element over the base --

    def _helper_model(self):
        # F_{q^f}(t): same residue field as the extension, base variable
        return LaurentModel.get(self.extension.q, var=self.base.var,
                                tower=("helper", self.base.key()))

    def expand(self, y):
        """Coordinates of y in the base-module basis {s^a w^b} (a < e, b < f),
        as a list of e*f base elements, indexed a*f + b."""
        if y.model is not self.extension:
            raise ValueError("element not of the extension model")
        H = self._helper_model()
        e = self.e
        num, den = y.raw
        pnum = self._scoords(num, H)
        pden = self._scoords(den, H)
        # solve (sum_a y_a s^a) * den = num over H, in the ring H[s]/(s^e - t)
        cols = []
        for a in range(e):
            shifted = self._smul_power(pden, a, H)
            cols.append(shifted)
        mat = [[cols[a][i] for a in range(e)] for i in range(e)]
        ys = _solve_linear(H, mat, list(pnum))
        # descend coefficients from F_{q^f} to F_q
        out = [None] * (e * self.f)
        for a in range(e):
            comps = self._descend_coeffs(ys[a])
            for b in range(self.f):
                out[a * self.f + b] = comps[b]
        return out

    def in_base(self, y):
        """The base element equal to y, or None if y is not in the base."""
        coords = self.expand(y)
        for i, c in enumerate(coords):
            if i != 0 and c.valuation() != INF:
                return None
        return coords[0]

    def _scoords(self, pol, H):
        """s-polynomial over F_{q^f} -> e coordinates in H = F_{q^f}(t)."""
        e = self.e
        buckets = [[] for _ in range(e)]
        for k, c in enumerate(pol):
            a, tpow = k % e, k // e
            lst = buckets[a]
            while len(lst) <= tpow:
                lst.append(0)
            lst[tpow] = c
        return [H.element(tuple(b)) for b in buckets]

    def _smul_power(self, coords, a, H):
        """Coordinates of (s^a * element) given element coordinates; s^e = t."""
        e = self.e
        t = H.uniformizer()
        out = [H.zero()] * e
        for i, c in enumerate(coords):
            j = i + a
            out[j % e] = out[j % e] + (c * t ** (j // e) if j >= e else c)
        return out

    def _descend_coeffs(self, h):
        """Element of F_{q^f}(t) -> f coordinates over F_q(t) in basis {W^b}.

        The denominator is cleared into F_q by multiplying numerator and
        denominator by the product of the Frobenius conjugates of the
        denominator (Frobenius x -> x^q permutes those factors, so the new
        denominator has Frobenius-fixed, i.e. F_q, coefficients)."""
        H = h.model
        gf_big = H.gf
        q_small = self.base.q
        num, den = h.raw
        for _ in range(self.f - 1):
            den_conj = tuple(gf_big.pow(c, q_small) for c in den)
            num = pmul(gf_big, num, den_conj)
            den = pmul(gf_big, den, den_conj)
            if den == tuple(gf_big.pow(c, q_small) for c in den):
                break
        table = self._descend_table()
        emb_inv = {self._coef_emb[c]: c for c in range(q_small)}
        den_small = tuple(emb_inv[c] for c in den)
        comps = []
        for b in range(self.f):
            comp_num = ptrim([table[c][b] for c in num])
            comps.append(self.base.element(comp_num, den_small))
        return comps

    @lru_cache(maxsize=None)
    def _descend_table(self):
        """For each element c of F_{q^f}: its f coordinates over F_q in the
        basis {W^b}, as a tuple of f GF(q)-ints.  Built by brute force over
        all q^f coordinate combinations (desk scale: q^f <= 81)."""
        gf_big = self.extension.gf
        gf_small = self.base.gf
        emb = self._coef_emb
        W = gf_big.from_coeffs([0, 1]) if gf_big.m > 1 else 1
        basis = []
        img = 1
        for _ in range(self.f):
            basis.append(img)
            img = gf_big.mul(img, W)
        stack = [((), 0)]
        for b in range(self.f):
            new = []
            for coords, acc in stack:
                for c in range(gf_small.q):
                    new.append((coords + (c,), gf_big.add(acc, gf_big.mul(emb[c], basis[b]))))
            stack = new
        table = {}
        for coords, acc in stack:
            table[acc] = coords
        assert len(table) == gf_big.q
        return table


def embed(x, ext):
    """Embed a base-model element into the extension model of ext."""
    return ext.embed(x)


def _solve_linear(model, mat, rhs):
    """Solve the square system mat * y = rhs over a field model, exactly."""
    n = len(rhs)
    a = [row[:] + [rhs[i]] for i, row in enumerate(mat)]
    for col in range(n):
        piv = None
        for r in range(col, n):
            if a[r][col].valuation() != INF:
                piv = r
                break
        if piv is None:
            raise ValueError("singular system")
        a[col], a[piv] = a[piv], a[col]
        inv = model.one() / a[col][col]
        a[col] = [c * inv for c in a[col]]
        for r in range(n):
            if r != col and a[r][col].valuation() != INF:
                f = a[r][col]
                a[r] = [a[r][k] - f * a[col][k] for k in range(n + 1)]
    return [a[i][n] for i in range(n)]


def expand_over(y, target_model):
    """Coordinates of y over target_model, descending the extension tower
    one level at a time.  Returns a list of target-model elements."""
    model = y.model
    if model is target_model:
        return [y]
    tower = model.tower
    if not tower or tower[0] == "helper":
        raise ValueError("no tower path to the target model")
    base, e, f = tower
    ext = ExtensionDescriptor(base, e=e, f=f, var=model.var)
    coords = ext.expand(y)
    out = []
    for c in coords:
        out.extend(expand_over(c, target_model))
    return out
