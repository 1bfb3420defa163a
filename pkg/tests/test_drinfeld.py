import random
from fractions import Fraction

import pytest

from btbuildings.building import ApartmentPoint, BuildingDescriptor, PolyVertex, involution_lambda, apartment_point_of_vertex
from btbuildings.drinfeld import (
    AbsValue, GaussSeminorm, Poly, RigidPoint, deform, diagonalize_norm,
    dual_coords, eval_abs, gauss_eval, membership_depth, omega_membership,
    tau_coordinates, tower_embed, unimodular_count,
    unimodular_representatives, verify_diagonal)
from btbuildings.errors import BudgetError
from btbuildings.field import (INF, ExtensionDescriptor, LaurentModel,
                               PAdicModel, valuation)
from btbuildings.lattice import vertex_from_diagonal

F2T = LaurentModel.get(2)
F3T = LaurentModel.get(3)

EXT_RAM = ExtensionDescriptor(F2T, e=2, f=1)     # K = F_2(s), s^2 = t
EXT_UNRAM = ExtensionDescriptor(F2T, e=1, f=2)   # K = F_4(s), s = t
EXT_QUARTIC = ExtensionDescriptor(F2T, e=2, f=2)  # K = F_4(s), s^2 = t
K_RAM = EXT_RAM.extension
K_UNRAM = EXT_UNRAM.extension
K4 = EXT_QUARTIC.extension

B1_RAM = BuildingDescriptor([(F2T, 1)])


def _point_ram(coord_str):
    return RigidPoint(B1_RAM, K_RAM, [[K_RAM.element(coord_str)]])


def _point_unram(coord_str, d=1):
    coords = [K_UNRAM.element(c) for c in ([coord_str] if isinstance(coord_str, str)
                                           else coord_str)]
    B = BuildingDescriptor([(F2T, d)])
    return RigidPoint(B, K_UNRAM, [coords])


def _point_quartic(coord_strs, d=None):
    coords = [K4.element(c) for c in coord_strs]
    d = len(coords) if d is None else d
    B = BuildingDescriptor([(F2T, d)])
    return RigidPoint(B, K4, [coords])


def test_rigid_point_validation():
    # s is not in F_2(t): {1, s} independent over F_2(t)
    _point_ram("s")
    # w generates F_4 over F_2: independent
    _point_unram("w")
    # a k-rational coordinate lies on a hyperplane
    with pytest.raises(ValueError):
        _point_ram("s^2")  # s^2 = t is in the base field
    with pytest.raises(ValueError):
        _point_unram("1+s")


def test_eval_abs_examples():
    x = _point_ram("s")
    t11 = Poly.var(K_RAM, (0, 1))
    av = eval_abs(x, t11)
    assert av.exponent == Fraction(1, 2)
    one = Poly.const(K_RAM, 1)
    assert eval_abs(x, one).exponent == 0
    # p = t_{1,1}^2 + t*t_{1,1} at x = s: |t + t*s| -> exponent 1
    p = t11 * t11 + t11.scale(K_RAM.element("s^2"))
    assert eval_abs(x, p).exponent == 1


def test_eval_abs_axioms_random():
    rng = random.Random(2718)
    x = _point_quartic(["w", "s*w"])
    keys = [(0, 1), (0, 2)]
    K = K4

    def rand_poly():
        p = Poly.const(K, 0)
        for _ in range(rng.randrange(1, 4)):
            term = Poly.const(K, K.from_digits(
                [rng.randrange(4) for _ in range(3)], shift=rng.randrange(-1, 2)))
            for k in keys:
                for _ in range(rng.randrange(0, 2)):
                    term = term * Poly.var(K, k)
            p = p + term
        return p

    for _ in range(1000):
        p, q = rand_poly(), rand_poly()
        vp, vq = eval_abs(x, p), eval_abs(x, q)
        assert eval_abs(x, p * q).exponent == (vp * vq).exponent
        vs = eval_abs(x, p + q)
        assert vs.exponent >= min(vp.exponent, vq.exponent)
        if vp.exponent != vq.exponent:
            assert vs.exponent == min(vp.exponent, vq.exponent)


def test_unimodular_representative_counts():
    for q, n, dim in [(2, 1, 2), (2, 2, 2), (3, 1, 3), (2, 2, 3)]:
        model = LaurentModel.get(q)
        reps = unimodular_representatives(model, n, dim)
        assert len(reps) == unimodular_count(q, n, dim)
        assert len(set(tuple(str(c) for c in r) for r in reps)) == len(reps)
    # n=1, dim=2: projective line, q+1 classes
    assert unimodular_count(2, 1, 2) == 3


def test_omega_membership_examples():
    # x = w over the unramified quadratic: all |a_0 + a_1 w| = 1, so in X[1]
    x = _point_unram("w")
    assert omega_membership(x, 1, closed=True)
    assert omega_membership(x, 1, closed=False)

    # x = t*w: |a_0 + a_1 t w|: alpha = (1, anything) gives |1| = 1;
    # alpha = (0,1) gives |t w| = |t|; bound |t|^1 * max(1, |tw|) = |t|
    y = _point_unram("s*w")  # s = t in the unramified model
    assert omega_membership(y, 1, closed=True)
    assert not omega_membership(y, 1, closed=False)  # equality is not strict

    # any valid point is a member for some n within the budget
    for pt in [x, y, _point_ram("s"), _point_ram("s^3")]:
        n = membership_depth(pt, max_n=3)
        assert n is not None


def test_omega_filtration_monotone():
    # the filtration grows with n: X[n] <= X[m] for m >= n (the union is X);
    # s^3 is a witness in X[2] \ X[1]
    pts = [_point_unram("w"), _point_ram("s"), _point_unram("s*w"),
           _point_ram("s^3")]
    for x in pts:
        for n in range(1, 4):
            if omega_membership(x, n):
                for m in range(n + 1, 4):
                    assert omega_membership(x, m)
            if omega_membership(x, n, closed=False):
                assert omega_membership(x, n, closed=True)
    assert omega_membership(_point_ram("s^3"), 2)
    assert not omega_membership(_point_ram("s^3"), 1)


def test_omega_budget():
    x = _point_ram("s")
    with pytest.raises(BudgetError):
        omega_membership(x, 3, budget=10)


def test_tau_coordinates():
    x = _point_unram("w")
    pt = tau_coordinates(x)
    assert pt.exponents(0) == (0, 0)

    # a coordinate of fractional valuation sits inside a subdivided edge
    z = _point_ram("s")
    pt = tau_coordinates(z)
    assert pt.exponents(0) == (0, Fraction(1, 2))

    z3 = _point_ram("s^3")
    assert tau_coordinates(z3).exponents(0) == (0, Fraction(3, 2))


def test_diagonalize_norm_already_diagonal():
    x = _point_unram("w")
    basis, exps = diagonalize_norm(x, 0, 1)
    assert exps == (0, 0)
    assert [[str(c) for c in row] for row in basis] == [["1", "0"], ["0", "1"]]
    assert verify_diagonal(x, 0, basis, 2)


def test_diagonalize_norm_ramified_midpoint():
    x = _point_ram("s")
    basis, exps = diagonalize_norm(x, 0, 1)
    assert exps == (0, Fraction(1, 2))
    assert verify_diagonal(x, 0, basis, 2)


def test_diagonalize_norm_d2():
    # the nearest valid relative of the (w, t*w) picture: over a quadratic K
    # the set {1, w, t*w} is k-dependent, so a quartic K hosts the d=2 point
    x = _point_quartic(["w", "s*w"])
    basis, exps = diagonalize_norm(x, 0, 1)
    assert sorted(exps) == [0, 0, Fraction(1, 2)]
    assert verify_diagonal(x, 0, basis, 2)


def test_diagonalize_norm_nontrivial_reduction():
    # x = 1 + s: {1, x} independent over F_2(t); |a_0 + a_1(1+s)| is not
    # diagonal in the standard basis (a = (1,1): |1 + 1 + s| = |s| < 1)
    x = _point_ram("1+s")
    basis, exps = diagonalize_norm(x, 0, 1)
    assert verify_diagonal(x, 0, basis, 2)
    assert Fraction(1, 2) in exps


def test_diagonalize_certificate_error():
    deep = _point_ram("s^3")  # in X[2] but not X[1]
    with pytest.raises(ValueError, match="certification depth"):
        diagonalize_norm(deep, 0, 1)
    basis, exps = diagonalize_norm(deep, 0, 2)
    assert exps == (0, Fraction(3, 2))
    assert verify_diagonal(deep, 0, basis, 3)


def test_gauss_eval_examples():
    B = BuildingDescriptor([(F2T, 1)])
    origin = GaussSeminorm(B, [(None, (0, 0))])
    T0 = Poly.var(K_RAM, (0, 0))
    T1 = Poly.var(K_RAM, (0, 1))
    assert gauss_eval(origin, T0 + T1, K_RAM).exponent == 0

    b = GaussSeminorm(B, [(None, (0, 1))])  # rho(T_1) = |t|
    p = T1 * T1
    assert gauss_eval(b, p, K_RAM).exponent == 2

    rng = random.Random(14)
    for _ in range(30):
        exps = (0, Fraction(rng.randrange(0, 5), 2))
        b = GaussSeminorm(B, [(None, exps)])
        # random linear form: max over terms
        c0 = K_RAM.from_digits([rng.randrange(2) for _ in range(3)])
        c1 = K_RAM.from_digits([rng.randrange(2) for _ in range(3)], shift=1)
        p = T0.scale(c0) + T1.scale(c1)
        got = gauss_eval(b, p, K_RAM)
        terms = []
        if c0.valuation() != INF:
            terms.append(Fraction(c0.valuation(), 2) + exps[0])
        if c1.valuation() != INF:
            terms.append(Fraction(c1.valuation(), 2) + exps[1])
        assert got.exponent == (min(terms) if terms else INF)


def test_gauss_tau_j_identity():
    # gauss_eval on the linear forms reproduces the defining exponents
    B = BuildingDescriptor([(F2T, 2)])
    exps = (0, Fraction(1, 2), 1)
    b = GaussSeminorm(B, [(None, exps)])
    for j in range(3):
        Tj = Poly.var(K_RAM, (0, j))
        assert gauss_eval(b, Tj, K_RAM).exponent == exps[j]


def test_deform_endpoints():
    x = _point_ram("s")
    t11 = Poly.var(K_RAM, (0, 1))
    p = t11 * t11 + t11.scale(K_RAM.element("s^2")) + Poly.const(K_RAM, K_RAM.element("s^2"))
    # t = 0 (exponent INF): rho_0 = rho
    assert deform(x, INF, p).exponent == eval_abs(x, p).exponent
    # t = 1 (exponent 0): Gauss value max |a_N| prod rho(x_j)^{n_j}
    vx = eval_abs(x, t11).exponent
    gauss = min(2 * vx, 1 + vx, 1)
    assert deform(x, 0, p).exponent == gauss


def test_deform_example_rho1():
    # p = t_{1,1} + c: rho_1 = max(|x|, |c|)
    x = _point_ram("s")
    for c_str in ["1", "s^2", "s^4"]:
        c = K_RAM.element(c_str)
        p = Poly.var(K_RAM, (0, 1)) + Poly.const(K_RAM, c)
        want = min(eval_abs(x, Poly.var(K_RAM, (0, 1))).exponent,
                   Fraction(c.valuation(), 2))
        assert deform(x, 0, p).exponent == want


def test_deform_linear_constant_on_diagonal_points():
    # for x with diagonal restricted norm, rho_t(p) = rho(p) for linear p
    x = _point_quartic(["w", "s*w"])
    for c0, c1, c2 in [("1", "1", "0"), ("s", "w", "1"), ("0", "1", "w")]:
        p = (Poly.const(K4, K4.element(c0))
             + Poly.var(K4, (0, 1)).scale(K4.element(c1))
             + Poly.var(K4, (0, 2)).scale(K4.element(c2)))
        base = eval_abs(x, p).exponent
        for t_exp in [Fraction(0), Fraction(1, 2), Fraction(1), Fraction(2), INF]:
            assert deform(x, t_exp, p).exponent == base


def test_deform_rejects_negative_t():
    x = _point_ram("s")
    with pytest.raises(ValueError):
        deform(x, -1, Poly.var(K_RAM, (0, 1)))


def test_dual_coords():
    pt = ApartmentPoint([(None, (0, 0))])
    assert dual_coords(pt, 0) == (0, 0)
    pt = ApartmentPoint([(None, (0, 1))])
    assert dual_coords(pt, 0) == (0, -1)
    # random diagonal vertex: dual coords = coordinates of the involution image
    rng = random.Random(33)
    for _ in range(20):
        exps = tuple(rng.randrange(0, 4) for _ in range(3))
        v = PolyVertex((vertex_from_diagonal(F3T, exps),))
        pt = apartment_point_of_vertex(v)
        lv = involution_lambda(v, [1])
        lpt = apartment_point_of_vertex(lv)
        sc = dual_coords(pt, 0)
        norm = tuple(x - sc[0] for x in sc)
        assert norm == lpt.exponents(0)


def test_tower_embed_two_levels():
    ext2 = ExtensionDescriptor(K_RAM, e=1, f=2)
    K2 = ext2.extension
    x = F2T.element("1+t")
    y = tower_embed(x, K2)
    assert valuation(y) == 0
    assert tower_embed(x, F2T) == x
