"""Command-line surface: ball generation, projections, subdivisions,
automorphism analysis, rigid-point queries, verification suites, export.

Exit codes: 0 pass, 1 verification failure, 2 input error, 3 budget.
All numeric output is exact (integers and fraction strings); identical
seed and flags produce byte-identical artifacts.
"""

import argparse
import json
import sys
from fractions import Fraction

from .autdecomp import AutWord, decompose_hom, normal_form
from .building import (ApartmentPoint, BuildingDescriptor, PolyVertex, ball,
                       basic_chamber, involution_lambda, labelling_C,
                       project_apartment)
from .drinfeld import (Poly, RigidPoint, deform, eval_abs, membership_depth,
                       omega_membership, tau_coordinates)
from .errors import BudgetError, WindowError
from .field import ExtensionDescriptor, LaurentModel, PAdicModel
from .lattice import canonical_form
from .subdivision import (Marking, eta_chambers, nu_embed, subdivide_ball)
from .verify import Config, run_suite


def parse_field(spec):
    kind, _, param = spec.partition(":")
    if kind == "padic":
        return PAdicModel.get(int(param))
    if kind == "laurent":
        return LaurentModel.get(int(param))
    raise ValueError(f"unknown field spec {spec!r}; use padic:p or laurent:q")


def build_descriptor(args):
    fields = [parse_field(s) for s in args.field.split(",")]
    dims = [int(x) for x in args.d.split(",")]
    if len(fields) == 1 and len(dims) > 1:
        fields = fields * len(dims)
    if len(fields) != len(dims):
        raise ValueError("--field and --d lists must have matching lengths")
    if args.r is not None and args.r != len(dims):
        raise ValueError(f"--r {args.r} does not match {len(dims)} factors")
    return BuildingDescriptor(list(zip(fields, dims)))


def parse_vertex(descriptor, text):
    obj = json.loads(text)
    if isinstance(obj, dict):
        obj = obj["matrix_per_factor"]
    comps = []
    for (model, d), flat in zip(descriptor.factors, obj):
        n = d + 1
        if len(flat) != n * n:
            raise ValueError(f"matrix must have {n * n} entries")
        mat = [[model.elem_parse(flat[i * n + j]) for j in range(n)]
               for i in range(n)]
        cols = [[mat[j][i] for j in range(n)] for i in range(n)]
        comps.append(canonical_form(model, cols))
    return PolyVertex(tuple(comps))


def emit(args, obj, dot=None):
    if args.format == "dot":
        if dot is None:
            raise ValueError("this command has no DOT output")
        text = dot
    else:
        text = json.dumps(obj, sort_keys=True, indent=2) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_ball(args):
    descriptor = build_descriptor(args)
    center = (parse_vertex(descriptor, args.vertex) if args.vertex
              else descriptor.origin())
    b = ball(descriptor, center, args.radius, detail=args.detail,
             budget=args.budget)
    emit(args, b.to_json_obj(), dot=b.to_dot())
    return 0


def cmd_project(args):
    descriptor = build_descriptor(args)
    x = parse_vertex(descriptor, args.vertex)
    pt = project_apartment(x)
    emit(args, {"exponents": [[str(e) for e in pt.exponents(i)]
                              for i in range(descriptor.r)]})
    return 0


def cmd_label(args):
    descriptor = build_descriptor(args)
    x = parse_vertex(descriptor, args.vertex)
    emit(args, {"label": list(labelling_C(x))})
    return 0


def cmd_involution(args):
    descriptor = build_descriptor(args)
    x = parse_vertex(descriptor, args.vertex)
    mask = [int(b) for b in args.mask.split(",")] if args.mask \
        else [1] * descriptor.r
    img = involution_lambda(x, mask)
    emit(args, {"image": [c.serialize() for c in img.components],
                "label": list(labelling_C(img))})
    return 0


def cmd_subdivide(args):
    descriptor = build_descriptor(args)
    b = ball(descriptor, descriptor.origin(), args.radius, detail="faces",
             budget=args.budget)
    marking = Marking([int(x) for x in args.marking.split(",")])
    sub = subdivide_ball(b, marking)
    emit(args, sub.to_json_obj())
    return 0


def cmd_eta(args):
    charts = eta_chambers(int(args.d), args.n)
    emit(args, {"d": int(args.d), "n": args.n, "count": len(charts),
                "charts": [{"sigma": list(c.sigma), "a": list(c.a),
                            "vertices": [list(v) for v in c.vertices()]}
                           for c in charts]})
    return 0


def cmd_extend(args):
    descriptor = build_descriptor(args)
    if descriptor.r != 1:
        raise ValueError("extend operates on a single factor")
    model, d = descriptor.factors[0]
    ext = ExtensionDescriptor(model, e=args.e, f=args.f)
    x = (parse_vertex(descriptor, args.vertex) if args.vertex
         else descriptor.origin())
    img = nu_embed(x.components[0], ext)
    emit(args, {"e": args.e, "f": args.f,
                "extension_field": {"q": ext.extension.q, "var": ext.extension.var},
                "image": img.serialize(),
                "image_label": img.label()})
    return 0


def cmd_decompose_aut(args):
    obj = json.loads(args.map)
    sizes_in = tuple(obj["sizes_in"])
    sizes_out = tuple(obj["sizes_out"])
    f = {tuple(u): tuple(v) for u, v in obj["map"]}
    dec = decompose_hom(f, sizes_in, sizes_out)
    emit(args, {"mu": list(dec.mu), "gs": [list(g) for g in dec.gs],
                "constants": {str(k): v for k, v in sorted(dec.consts.items())}})
    return 0


def cmd_normal_form(args):
    descriptor = build_descriptor(args)
    word = AutWord.from_json_obj(descriptor, json.loads(args.word))
    b = ball(descriptor, descriptor.origin(), args.radius, budget=args.budget)
    g, r, mu, report = normal_form(word, b)
    obj = {
        "g_matrices": [[model.elem_str(x) for row in gi for x in row]
                       for gi, (model, _d) in zip(g, descriptor.factors)],
        "r_mask": r,
        "mu": mu,
        "report": report,
    }
    emit(args, obj)
    return 0 if report["passed"] else 1


def _build_rigid_point(args, descriptor):
    exts = []
    model = descriptor.models[0]
    for part in args.ext.split(";"):
        e_s, f_s = part.split(",")
        ext = ExtensionDescriptor(model, e=int(e_s), f=int(f_s))
        exts.append(ext)
        model = ext.extension
    K = model
    coords = json.loads(args.point)
    return RigidPoint(descriptor, K, [[K.elem_parse(c) for c in factor]
                                      for factor in coords]), K


def cmd_omega(args):
    descriptor = build_descriptor(args)
    x, K = _build_rigid_point(args, descriptor)
    results = []
    for n in range(1, args.depth + 1):
        results.append({
            "n": n,
            "closed": omega_membership(x, n, closed=True, budget=args.budget),
            "open": omega_membership(x, n, closed=False, budget=args.budget),
        })
    first = membership_depth(x, max_n=args.depth, budget=args.budget)
    tau = tau_coordinates(x)
    emit(args, {"memberships": results, "first_depth": first,
                "tau_exponents": [[str(e) for e in tau.exponents(i)]
                                  for i in range(descriptor.r)]})
    return 0


def cmd_retract(args):
    descriptor = build_descriptor(args)
    if descriptor.r != 1:
        raise ValueError("retract operates on one factor")
    x, K = _build_rigid_point(args, descriptor)
    terms = {}
    for term in json.loads(args.poly):
        exps = tuple(sorted(((0, int(j)), int(n))
                            for j, n in term["monomial"].items()))
        coeff = K.elem_parse(term["coeff"])
        p_term = terms.get(exps)
        terms[exps] = coeff if p_term is None else p_term + coeff
    p = Poly(K, terms)
    out = []
    for t_s in args.t.split(","):
        t_exp = Fraction(t_s) if t_s != "inf" else float("inf")
        av = deform(x, t_exp, p)
        out.append({"t_exponent": t_s, "value_exponent": av.serialize()})
    out_obj = {"path": out, "evaluation": eval_abs(x, p).serialize()}
    emit(args, out_obj)
    return 0


def cmd_verify(args):
    factors = None
    try:
        factors = list(build_descriptor(args).factors)
    except ValueError:
        factors = None
    config = Config(factors=factors, radius=args.radius, depth=args.depth,
                    budget=args.budget, seed=args.seed)
    kwargs = {}
    if args.suite == "gaussian-binomials" and args.q:
        kwargs = {"qs": tuple(int(q) for q in args.q.split(",")),
                  "dmax": int(args.d.split(",")[0])}
        from .verify import suite_gaussian_binomials
        report = suite_gaussian_binomials(config, **kwargs)
        report["suite"] = args.suite
        report["seed"] = config.seed
    else:
        report = run_suite(args.suite, config)
    emit(args, report)
    return 0 if report["passed"] else 1


_COMMON_DEFAULTS = {
    "field": "padic:2", "d": "1", "r": None, "radius": 2, "depth": 3,
    "seed": 0, "budget": 20000, "format": "json", "out": None,
}


def _add_common(parser, suppress):
    S = argparse.SUPPRESS
    dv = (lambda key: S) if suppress else _COMMON_DEFAULTS.get
    parser.add_argument("--field", default=dv("field"),
                        help="comma list of padic:p | laurent:q (default padic:2)")
    parser.add_argument("--d", default=dv("d"),
                        help="comma list of factor dimensions")
    parser.add_argument("--r", type=int, default=dv("r"),
                        help="factor count check")
    parser.add_argument("--radius", type=int, default=dv("radius"))
    parser.add_argument("--depth", type=int, default=dv("depth"))
    parser.add_argument("--seed", type=int, default=dv("seed"))
    parser.add_argument("--budget", type=int, default=dv("budget"))
    parser.add_argument("--format", choices=["json", "dot"],
                        default=dv("format"))
    parser.add_argument("--out", default=dv("out"),
                        help="write the artifact to a file")


def make_parser():
    p = argparse.ArgumentParser(
        prog="btb", allow_abbrev=False,
        description="Exact computations on Bruhat-Tits buildings, their "
                    "products, and rigid points of Drinfeld spaces")
    _add_common(p, suppress=False)
    sub = p.add_subparsers(dest="command", required=True)

    def add_parser(name, **kw):
        s = sub.add_parser(name, allow_abbrev=False, **kw)
        _add_common(s, suppress=True)
        return s

    s = add_parser("ball", help="window of the building around a vertex")
    s.add_argument("--vertex", default=None)
    s.add_argument("--detail", choices=["vertices", "edges", "faces"],
                   default="faces")
    s.set_defaults(func=cmd_ball)

    s = add_parser("project", help="norm-formula apartment projection")
    s.add_argument("--vertex", required=True)
    s.set_defaults(func=cmd_project)

    s = add_parser("label", help="labelling C of a vertex")
    s.add_argument("--vertex", required=True)
    s.set_defaults(func=cmd_label)

    s = add_parser("involution", help="dual-lattice involution lambda")
    s.add_argument("--vertex", required=True)
    s.add_argument("--mask", default=None, help="comma list of 0/1 per factor")
    s.set_defaults(func=cmd_involution)

    s = add_parser("subdivide", help="subdivide the chambers of a window")
    s.add_argument("--marking", required=True, help="comma list per factor")
    s.set_defaults(func=cmd_subdivide)

    s = add_parser("eta", help="alcove charts of the dilated simplex")
    s.add_argument("--n", type=int, required=True)
    s.set_defaults(func=cmd_eta)

    s = add_parser("extend", help="embed a vertex along a field extension")
    s.add_argument("--vertex", default=None)
    s.add_argument("--e", type=int, default=1, help="ramification index")
    s.add_argument("--f", type=int, default=1, help="residue degree")
    s.set_defaults(func=cmd_extend)

    s = add_parser("decompose-aut", help="decompose a product-graph map")
    s.add_argument("--map", required=True,
                   help='JSON {"sizes_in":[..],"sizes_out":[..],"map":[[u,v],..]}')
    s.set_defaults(func=cmd_decompose_aut)

    s = add_parser("normal-form", help="normal form of a generator word")
    s.add_argument("--word", required=True, help="AutWord JSON")
    s.set_defaults(func=cmd_normal_form)

    s = add_parser("omega", help="Schneider-Stuhler membership of a point")
    s.add_argument("--point", required=True, help="JSON coords per factor")
    s.add_argument("--ext", default="2,1",
                   help='extension tower "e,f[;e,f..]" above the base field')
    s.set_defaults(func=cmd_omega)

    s = add_parser("retract", help="deformation rho_t toward the skeleton")
    s.add_argument("--point", required=True)
    s.add_argument("--ext", default="2,1")
    s.add_argument("--poly", required=True,
                   help='JSON [{"coeff": str, "monomial": {"j": n}}, ..]')
    s.add_argument("--t", default="0,1/2,1", help="comma list of t-exponents")
    s.set_defaults(func=cmd_retract)

    s = add_parser("verify", help="run a named invariant suite")
    s.add_argument("suite")
    s.add_argument("--q", default=None, help="suite parameter override")
    s.set_defaults(func=cmd_verify)

    return p


def main(argv=None):
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BudgetError as ex:
        print(f"budget exceeded: {ex}", file=sys.stderr)
        return 3
    except WindowError as ex:
        print(f"verification failure: {ex}", file=sys.stderr)
        return 1
    except (ValueError, KeyError, json.JSONDecodeError, OSError) as ex:
        print(f"input error: {ex}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
