"""Command-line entry point: every computation as a schema-versioned JSON (or CSV) artifact.

Exit status: 0 on success, 1 on domain or cap errors, 2 on usage errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from fractions import Fraction

SCHEMA_VERSION = "1.0"


def schema_path(command):
    """Path of the JSON schema shipped for a subcommand's artifact."""
    from importlib.resources import files

    return files("lvrkit") / "schemas" / (command.replace("-", "_") + ".json")


# ---------------------------------------------------------------- arg types


def int_at_least(lo):
    def parse(text):
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
        if v < lo:
            raise argparse.ArgumentTypeError(f"must be >= {lo}, got {v}")
        return v

    parse.__name__ = f"int>={lo}"
    return parse


def int_list(text):
    try:
        return tuple(int(x) for x in text.split(",") if x.strip() != "")
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def complex_arg(text):
    try:
        return complex(text.replace(" ", ""))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a complex number like 0.1+0.2j, got {text!r}") from None


def n_arg(text):
    if text == "symbolic":
        return None
    return int_at_least(1)(text)


def fraction_str(x):
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def complex_json(z):
    z = complex(z)
    return [z.real, z.imag]


# ---------------------------------------------------------------- metadata


def convention_flags(args):
    from .ribbon import MODEL_TAG, SCALAR_NORMALIZATION

    return {
        "model": MODEL_TAG,
        "vertex_symmetry": getattr(args, "convention", "v!"),
        "lambda_order": "number of interaction vertices",
        "scalar_normalization": SCALAR_NORMALIZATION,
        "scalar_index_structure": "tau_pi = canonical cycle of type pi, xi_pi = identity",
        "cilia_convention": "K source pairs (K J-dagger and K J insertions)",
        "matrix_A_argument": "-(lam/N^(p-1)) X^(p-1)",
        "weingarten_source": "class Gram solve",
    }


def open_question_flags():
    from .weingarten import reference_table_discrepancies

    return {
        "weingarten_reference_table": reference_table_discrepancies(),
        "vertex_symmetry": "1/v and 1/v! both exposed; 1/v! matches Wick enumeration",
        "scalar_normalization": "fixed by matching Wick enumeration at lam^0",
        "eta_exponent": "carried as an opaque annotation on cilia, never evaluated",
        "domain_C": "taken to be the configured pacman domain",
    }


def envelope(command, args, result):
    echo = {k: _echo(v) for k, v in sorted(vars(args).items()) if k not in ("func", "out", "csv")}
    from .config import DEFAULT_CAPS, cap

    echo["caps"] = {name: cap(name) for name in DEFAULT_CAPS}
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "config_echo": echo,
        "convention_flags": convention_flags(args),
        "open_question_flags": open_question_flags(),
        "result": result,
    }


def _echo(v):
    if isinstance(v, complex):
        return complex_json(v)
    if isinstance(v, (tuple, list)):
        return [_echo(x) for x in v]
    return v


def atomic_write(path, text):
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def rows_to_csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(row)
    return buf.getvalue()


# ---------------------------------------------------------------- commands


def cmd_wg_table(args):
    from .ratfunc import RationalFunctionOfN
    from .weingarten import weingarten_table

    table = weingarten_table(args.k)
    rows = []
    for part, wg in table.items():
        row = {"cycle_type": list(part.parts),
               "numerator_coeffs": list(wg.num), "denominator_coeffs": list(wg.den)}
        at = {}
        for n in args.at:
            if n >= args.k:
                at[str(n)] = fraction_str(wg(n))
        row["value_at"] = at
        rows.append(row)
    csv_rows = [(" ".join(map(str, r["cycle_type"])), str(RationalFunctionOfN(tuple(r["numerator_coeffs"]),
                                                                        tuple(r["denominator_coeffs"]))))
                for r in rows]
    return {"k": args.k, "entries": rows}, (["cycle_type", "value"], csv_rows), f"{len(rows)} Weingarten entries for k={args.k}"


def cmd_wg_moment(args):
    from .weingarten import haar_moment

    v = haar_moment(args.a, args.b, args.c, args.d, args.N)
    return ({"a": list(args.a), "b": list(args.b), "c": list(args.c), "d": list(args.d), "N": args.N,
             "value": fraction_str(v)},
            (["value"], [(fraction_str(v),)]), f"moment = {fraction_str(v)}")


def cmd_fc(args):
    from .lvr_kernel import fuss_catalan_numbers

    fc = fuss_catalan_numbers(args.p, args.n - 1)
    rows = [{"p": args.p, "n": i, "coefficient": c} for i, c in enumerate(fc.coefficients)]
    return ({"rows": rows}, (["p", "n", "coefficient"], [(r["p"], r["n"], r["coefficient"]) for r in rows]),
            "C = " + ",".join(str(c) for c in fc.coefficients))


def cmd_tp(args):
    from .lvr_kernel import residual, tp_cardano, tp_eval, tp_series_eval

    rows = []
    for z in args.z:
        if args.method == "series":
            t = tp_series_eval(args.p, z, args.terms, args.guard)
        elif args.method == "cardano":
            if args.p != 3:
                raise ValueError("the radical formula is available for p=3 only")
            t = tp_cardano(z)
        else:
            t = tp_eval(args.p, z, args.guard, args.terms)
        rows.append({"p": args.p, "z_re": z.real, "z_im": z.imag, "t_re": t.real, "t_im": t.imag,
                     "residual": residual(args.p, z, t)})
    keys = ["p", "z_re", "z_im", "t_re", "t_im", "residual"]
    return ({"method": args.method, "rows": rows}, (keys, [tuple(r[k] for k in keys) for r in rows]),
            f"{len(rows)} evaluations, max residual {max(r['residual'] for r in rows):.3e}")


def _series_result(quantity, p, partition, series):
    return {"model": {"p": p, "normalization": "thooft-v1"}, "quantity": quantity,
            "partition": list(partition) if partition is not None else None,
            "order": series.order, "coefficients": series.to_json()}


def _series_csv(series):
    return ["m", "coefficient"], [(m, str(c)) for m, c in enumerate(series)]


def cmd_logz_series(args):
    from .ribbon import logz_series

    s = logz_series(args.p, args.order, args.convention)
    return _series_result("N^-2 log Z", args.p, None, s), _series_csv(s), f"logZ series to order {args.order}"


def cmd_cumulant_series(args):
    from .ribbon import invariant_cumulant_series, scalar_cumulant_series

    if args.kappa is None:
        s = invariant_cumulant_series(args.p, args.partition, args.order, args.convention)
        res = _series_result("connected E[prod (1/N) Tr (MM^dagger)^k_i]", args.p, args.partition, s)
    else:
        s, struct = scalar_cumulant_series(args.p, args.kappa, args.partition, args.order, args.convention)
        res = _series_result(f"scalar cumulant K^{args.kappa}_pi", args.p, args.partition, s)
        res["index_structure"] = struct.to_json()
    return res, _series_csv(s), f"{res['quantity']} to order {args.order}"


def cmd_corner_words(args):
    from .corner_calculus import differentiate_trace, faa_bound

    words = differentiate_trace(args.q, args.qbar)
    r = args.q + args.qbar
    rows = [{"word": w.text(), "cups": list(w.cup_labels()), **w.counters()} for w in words]
    return ({"q": args.q, "qbar": args.qbar, "count": len(words), "bound": faa_bound(r), "words": rows},
            (["word"], [(w["word"],) for w in rows]), f"{len(words)} terms (bound {faa_bound(r)})")


def cmd_tree_bounds(args):
    from .corner_calculus import mainamp_bound, tree_cumulant_bound

    b = tree_cumulant_bound(args.e_t, args.v_t, args.kappa, args.blocks, args.lam, args.p)
    res = {"tree_cumulant": {"scalar": b.scalar, "N_power": b.n_power}}
    summary = f"tree bound {b}"
    if args.coordinations:
        m = mainamp_bound(len(args.coordinations), args.coordinations, args.lam, args.k_const, args.kappa_p)
        res["mainamp"] = m
        summary += f"; amplitude bound {m!r}"
    rows = [("tree_cumulant_scalar", b.scalar), ("tree_cumulant_N_power", b.n_power)]
    if "mainamp" in res:
        rows.append(("mainamp", res["mainamp"]))
    return res, (["quantity", "value"], rows), summary


def cmd_oracle_wick(args):
    from .oracle import Trace, connected_series, interacting_moment

    factors = [Trace.power(k) for k in args.traces]
    if args.connected:
        s = connected_series(factors, args.p, args.order, args.N)
    else:
        s = interacting_moment(factors, args.p, args.order, args.N)
    res = _series_result("connected" if args.connected else "moment", args.p, args.traces, s)
    res["N"] = "symbolic" if args.N is None else args.N
    if args.N is not None:
        res["coefficients"] = [{"m": m, "value": fraction_str(c)} for m, c in enumerate(s)]
    return res, _series_csv(s), f"Wick series to order {args.order}"


def cmd_oracle_mc(args):
    from .oracle import mc_model

    run = mc_model(args.p, args.lam, args.N, args.sweeps, args.burn_in, args.seed, chains=args.chains,
                   kmax=args.kmax, keep_trace=args.trace_csv is not None)
    if args.trace_csv:
        run.write_trace_csv(args.trace_csv, thin=args.thin)
    summ = run.summary()
    rows = [(k, v["estimate"], v["stderr"]) for k, v in summ["invariants"].items()]
    return summ, (["invariant_name", "estimate", "stderr"], rows), \
        f"status {run.status}; " + "; ".join(f"{k}={v['estimate']:.6g}+-{v['stderr']:.2g}"
                                              for k, v in summ["invariants"].items())


def cmd_haar_mc(args):
    from .oracle import mc_haar
    from .weingarten import haar_moment

    est = mc_haar(args.N, args.samples, args.seed)
    rows = []
    worst = 0.0
    for m, e in est.items():
        exact = haar_moment(*m, args.N)
        se = complex(e.standard_error)
        diff = complex(e.mean) - float(exact)
        z = max(abs(diff.real) / se.real if se.real else (0.0 if diff.real == 0 else float("inf")),
                abs(diff.imag) / se.imag if se.imag else (0.0 if diff.imag == 0 else float("inf")))
        worst = max(worst, z)
        rows.append({"a": list(m[0]), "b": list(m[1]), "c": list(m[2]), "d": list(m[3]),
                     "estimate": complex_json(e.mean), "stderr": complex_json(se),
                     "exact": fraction_str(exact), "z_score": z})
    return ({"N": args.N, "samples": args.samples, "seed": args.seed, "moments": rows, "max_z_score": worst},
            (["a", "b", "c", "d", "estimate_re", "estimate_im", "exact", "z_score"],
             [(r["a"], r["b"], r["c"], r["d"], r["estimate"][0], r["estimate"][1], r["exact"], r["z_score"])
              for r in rows]),
            f"{len(rows)} moments, max z-score {worst:.2f}")


BOREL_PAIRS = {
    "exp": "a_n=(-1)^n (qn)!/n!, B(t)=exp(-t); q=1 gives F(z)=1/(1+z)",
    "one": "a_0=1, B=1, F=1",
    "stieltjes": "a_n=(-1)^n (qn)!, B(t)=1/(1+t); q=1 gives F(z)=exp(1/z)E1(1/z)/z",
}


def cmd_borel(args):
    import math

    import numpy as np

    from .borel import DomainSpec, domain_check, fit_sigma, inverse_borel_quadrature

    spec = DomainSpec(args.q, args.R, args.kind, args.angle, args.radius)
    chk = domain_check(args.z, spec)
    q = args.q
    if args.pair == "exp":
        coef = lambda n: (-1) ** n * math.factorial(q * n) // math.factorial(n)  # noqa: E731
        bfun = lambda t: np.exp(-t)  # noqa: E731
    elif args.pair == "one":
        coef = lambda n: 1 if n == 0 else 0  # noqa: E731
        bfun = lambda t: 1.0  # noqa: E731
    else:
        coef = lambda n: (-1) ** n * math.factorial(q * n)  # noqa: E731
        bfun = lambda t: 1.0 / (1.0 + t)  # noqa: E731
    out = {"q": q, "R": args.R, "z": complex_json(args.z), "in_domain": chk.inside,
           "domain": spec.to_json(), "flags": list(chk.flags)}
    if not chk.inside and not args.force:
        raise ValueError(f"z={args.z} is outside the domain (use --force to integrate anyway)")
    res = inverse_borel_quadrature(bfun, args.z, q)
    partial = 0j
    rems = []
    for n in range(args.orders + 1):
        partial += coef(n) * args.z ** n
        rems.append((n, abs(res.value - partial)))
    sigma = fit_sigma(rems, q, args.z)
    out.update({"value": complex_json(res.value), "error_estimate": res.error_estimate,
                "nodes": res.nodes, "sigma_hat": sigma, "pair": BOREL_PAIRS[args.pair],
                "remainders": [{"n": n, "abs_remainder": r} for n, r in rems]})
    return out, (["n", "abs_remainder"], rems), f"value {res.value:.12g}, sigma_hat {sigma:.6g}"


# ---------------------------------------------------------------- parser


def build_parser():
    ap = argparse.ArgumentParser(prog="lvrkit", description="Matrix-model combinatorics and checks.")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=func)
        sp.add_argument("--out", help="write the JSON artifact here (default: stdout)")
        sp.add_argument("--csv", help="also write a CSV table here")
        return sp

    sp = add("wg-table", cmd_wg_table, "Weingarten functions for all cycle types of k")
    sp.add_argument("--k", type=int_at_least(1), required=True)
    sp.add_argument("--symbolic", action="store_true", help="rational functions of N (always included)")
    sp.add_argument("--at", type=int_list, default=(), help="also evaluate at these N")

    sp = add("wg-moment", cmd_wg_moment, "exact Haar moment")
    for name in "abcd":
        sp.add_argument(f"--{name}", type=int_list, required=True)
    sp.add_argument("--N", type=int_at_least(1), required=True)

    sp = add("fc", cmd_fc, "Fuss-Catalan numbers C_0 .. C_{n-1}")
    sp.add_argument("--p", type=int_at_least(2), required=True)
    sp.add_argument("--n", type=int_at_least(1), required=True)

    sp = add("tp", cmd_tp, "evaluate T_p(z)")
    sp.add_argument("--p", type=int_at_least(2), required=True)
    sp.add_argument("--z", type=complex_arg, action="append", required=True)
    sp.add_argument("--method", choices=("auto", "series", "cardano"), default="auto")
    sp.add_argument("--terms", type=int_at_least(1), default=60)
    sp.add_argument("--guard", type=float, default=0.05)

    for name, func, help_ in (("logz-series", cmd_logz_series, "N^-2 log Z as a lam series"),
                              ("cumulant-series", cmd_cumulant_series, "invariant or scalar cumulant series")):
        sp = add(name, func, help_)
        sp.add_argument("--p", type=int_at_least(2), required=True)
        sp.add_argument("--order", type=int_at_least(0), required=True)
        sp.add_argument("--convention", choices=("v!", "v"), default="v!")
        if name == "cumulant-series":
            sp.add_argument("--partition", type=int_list, required=True)
            sp.add_argument("--kappa", type=int_at_least(1), default=None,
                            help="scalar cumulant with this many source pairs")

    sp = add("corner-words", cmd_corner_words, "terms of d^q/dM d^qbar/dM^dagger Tr 1/(v-MM^dagger)")
    sp.add_argument("--q", type=int_at_least(0), required=True)
    sp.add_argument("--qbar", type=int_at_least(0), required=True)

    sp = add("tree-bounds", cmd_tree_bounds, "tree cumulant and amplitude bound formulas")
    sp.add_argument("--e-t", type=int_at_least(0), required=True)
    sp.add_argument("--v-t", type=int_at_least(1), required=True)
    sp.add_argument("--kappa", type=int_at_least(1), required=True)
    sp.add_argument("--blocks", type=int_at_least(1), required=True)
    sp.add_argument("--lam", type=complex_arg, required=True)
    sp.add_argument("--p", type=int_at_least(2), required=True)
    sp.add_argument("--coordinations", type=int_list, default=())
    sp.add_argument("--k-const", type=float, default=1.0)
    sp.add_argument("--kappa-p", type=float, default=1.0)

    sp = add("oracle-wick", cmd_oracle_wick, "exact Wick enumeration of trace moments")
    sp.add_argument("--p", type=int_at_least(2), required=True)
    sp.add_argument("--order", type=int_at_least(0), required=True)
    sp.add_argument("--N", type=n_arg, default=None, help='integer or "symbolic"')
    sp.add_argument("--traces", type=int_list, required=True, help="powers k_i of (1/N) Tr (MM^dagger)^k_i")
    sp.add_argument("--connected", action="store_true")

    sp = add("oracle-mc", cmd_oracle_mc, "Metropolis estimates of trace invariants")
    sp.add_argument("--p", type=int_at_least(2), required=True)
    sp.add_argument("--lam", type=float, required=True)
    sp.add_argument("--N", type=int_at_least(1), required=True)
    sp.add_argument("--sweeps", type=int_at_least(1), required=True)
    sp.add_argument("--burn-in", type=int_at_least(0), default=2000)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--chains", type=int_at_least(1), default=4)
    sp.add_argument("--kmax", type=int_at_least(1), default=2)
    sp.add_argument("--trace-csv", default=None)
    sp.add_argument("--thin", type=int_at_least(1), default=1)

    sp = add("haar-mc", cmd_haar_mc, "sampled Haar moments against exact values")
    sp.add_argument("--N", type=int_at_least(1), required=True)
    sp.add_argument("--samples", type=int_at_least(2), required=True)
    sp.add_argument("--seed", type=int, required=True)

    sp = add("borel", cmd_borel, "domain test and inverse Borel-LeRoy integral for a known pair")
    sp.add_argument("--q", type=int_at_least(1), required=True)
    sp.add_argument("--R", type=float, default=1.0)
    sp.add_argument("--z", type=complex_arg, required=True)
    sp.add_argument("--kind", choices=("D_R", "pacman", "cardioid"), default="D_R")
    sp.add_argument("--angle", type=float, default=None)
    sp.add_argument("--radius", type=float, default=None)
    sp.add_argument("--pair", choices=sorted(BOREL_PAIRS), default="exp")
    sp.add_argument("--orders", type=int_at_least(1), default=3)
    sp.add_argument("--force", action="store_true")
    return ap


def run(argv=None):
    from .config import CapExceeded

    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        result, (header, rows), summary = args.func(args)
    except (CapExceeded, ValueError, ArithmeticError, RuntimeError) as exc:
        print(f"lvrkit {args.command}: error: {exc}", file=sys.stderr)
        return 1
    text = json.dumps(envelope(args.command, args, result), indent=2, sort_keys=True) + "\n"
    if args.csv:
        atomic_write(args.csv, rows_to_csv(header, rows))
    if args.out:
        atomic_write(args.out, text)
        print(f"{args.command}: {summary} -> {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
