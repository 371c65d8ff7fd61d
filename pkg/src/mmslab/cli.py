"""Command-line front end and experiment runner.

Subcommands: gen, invariant, box, dominates, atoms, spectral, compare, run.
Exit codes: 0 ok, 1 embedded assertion failed, 2 input error, 3 size limit.
Every reported number carries a certificate tag (exact | bound | estimate) and
infinities are printed as the string "inf".  Plans run their steps in order
and their CSV output is byte-identical across runs for a fixed seed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import atoms as atoms_mod
from . import boxmetric, core, functional, generators, observables, order

EXIT_OK = 0
EXIT_ASSERTION = 1
EXIT_INPUT = 2
EXIT_SIZE = 3


def _jsonable(x):
    if isinstance(x, float):
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.floating):
        return _jsonable(float(x))
    if isinstance(x, np.integer):
        return int(x)
    return x


def _print_json(obj, fmt="json"):
    if fmt == "csv":
        flat = _jsonable(obj)
        writer = csv.writer(sys.stdout)
        if isinstance(flat, dict):
            for k, v in flat.items():
                writer.writerow([k, v])
        else:
            for row in flat:
                writer.writerow(row if isinstance(row, (list, tuple)) else [row])
    else:
        json.dump(_jsonable(obj), sys.stdout, indent=2)
        sys.stdout.write("\n")


def _fmt_value(v):
    if isinstance(v, float):
        if math.isinf(v):
            return "inf"
        return repr(v)
    return str(v)


# ---------------------------------------------------------------------------
# space construction from CLI / plan parameters


def _parse_alpha(text):
    if text.endswith(".json"):
        with open(text, encoding="utf-8") as fh:
            data = json.load(fh)
        entries = data["entries"]
    else:
        entries = [float(t) for t in text.split(",") if t.strip() != ""]
    return atoms_mod.sort_atoms(entries)


def make_space(kind, params, seed=0):
    params = dict(params)
    if kind == "two_point":
        return generators.two_point(params.get("d", 1.0), params.get("first_mass", 0.5))
    if kind == "interval_grid":
        return generators.interval_grid(int(params["m"]), params.get("r", 1.0))
    if kind == "gaussian_sample":
        return generators.gaussian_sample(
            int(params["n_points"]),
            int(params.get("dim", 1)),
            params.get("sigma", 1.0),
            params.get("seed", seed),
        )
    if kind == "sphere_sample":
        return generators.sphere_sample(
            int(params["n_dim"]),
            params.get("radius", 1.0),
            int(params["n_points"]),
            params.get("seed", seed),
        )
    if kind == "atom_space":
        alpha = atoms_mod.sort_atoms(params["alpha"])
        return generators.atom_space(alpha, int(params.get("m_diffuse", 8)))
    if kind == "dissipation_family":
        alpha = atoms_mod.sort_atoms(params["alpha"])
        return generators.dissipation_family(alpha, params.get("delta", 1.0), int(params["n"]))
    if kind == "grid_interval":
        return functional.unit_interval_grid(int(params.get("m", 512)), params.get("length", 1.0))
    if kind == "grid_gaussian":
        return functional.gaussian_grid(int(params.get("m", 512)), params.get("sigma", 1.0))
    raise core.InputError(f"unknown generator kind {kind!r}")


def _cmd_gen(args):
    params = json.loads(args.params) if args.params else {}
    sp = make_space(args.kind, params, seed=args.seed)
    if isinstance(sp, functional.GridSpace1D):
        raise core.InputError("gen writes finite spaces; grid kinds exist only inside plans")
    core.save_space(sp, args.output)
    print(f"wrote {sp.n} points to {args.output}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# invariant evaluation


def evaluate_invariant(sp, kind, kappa=None, p=2.0, exact=False, seed=0):
    """Returns (value, certificate)."""
    if kind == "diam":
        return sp.diam(), "exact"
    if kind == "var":
        mode = "exact" if exact else "heuristic"
        return observables.variance(sp, mode=mode, seed=seed), (
            "exact" if exact else "estimate"
        )
    if kind == "pvar":
        mode = "exact" if exact else "heuristic"
        return observables.p_deviation(sp, p, mode=mode, seed=seed), (
            "exact" if exact else "estimate"
        )
    if kind == "obsdiam":
        mode = "exact" if exact else "heuristic"
        k = kappa[0] if kappa else 0.1
        return observables.obs_diam(sp, k, mode=mode, seed=seed), (
            "exact" if exact else "estimate"
        )
    if kind == "obsdiam_projection":
        k = kappa[0] if kappa else 0.1
        return observables.obs_diam_projection_estimate(sp, k), "estimate"
    if kind == "sep":
        if not kappa:
            raise core.InputError("sep requires --kappa")
        return observables.separation(sp, tuple(kappa)), "exact"
    raise core.InputError(f"unknown invariant kind {kind!r}")


def _cmd_invariant(args):
    sp = core.load_space(args.file)
    kappa = [float(t) for t in args.kappa.split(",")] if args.kappa else None
    value, cert = evaluate_invariant(
        sp, args.kind, kappa=kappa, p=args.p, exact=args.exact, seed=args.seed
    )
    _print_json({"kind": args.kind, "value": value, "certificate": cert}, args.format)
    return EXIT_OK


def _cmd_box(args):
    sx = core.load_space(args.fileA)
    sy = core.load_space(args.fileB)
    lower = boxmetric.box_lower(sx, sy)
    if args.exact:
        est = boxmetric.box_exact_small(sx, sy)
        out = {"lower": max(lower, est.lower), "upper": est.upper, "certificate": "exact"}
    else:
        est = boxmetric.box_upper(sx, sy, seed=args.seed)
        out = {"lower": lower, "upper": est.upper, "certificate": est.certificate}
    _print_json(out, args.format)
    return EXIT_OK


def _cmd_dominates(args):
    sx = core.load_space(args.fileX)
    sy = core.load_space(args.fileY)
    res = order.dominates(sx, sy)
    if isinstance(res, order.DominationWitness):
        _print_json(
            {"dominates": True, "map": list(res.map), "nodes_explored": res.nodes_explored},
            args.format,
        )
    else:
        _print_json(
            {"dominates": False, "refused": True, "nodes_explored": res.nodes_explored},
            args.format,
        )
    return EXIT_OK


def _cmd_atoms(args):
    if args.action in ("product", "contract") and not args.beta:
        raise core.InputError(f"atoms {args.action} requires --beta")
    if args.action == "member" and not args.space:
        raise core.InputError("atoms member requires --space")
    if args.action == "dissipate" and (not args.spaces or args.delta is None):
        raise core.InputError("atoms dissipate requires --spaces and --delta")
    if args.action == "product":
        a = _parse_alpha(args.alpha)
        b = _parse_alpha(args.beta)
        _print_json({"entries": list(atoms_mod.atom_product(a, b).entries)}, args.format)
        return EXIT_OK
    if args.action == "contract":
        a = _parse_alpha(args.alpha)
        b = _parse_alpha(args.beta)
        groups = atoms_mod.is_contraction(a, b)
        if groups is None:
            _print_json({"contraction": False, "refused": True}, args.format)
        else:
            _print_json({"contraction": True, "groups": [list(g) for g in groups]}, args.format)
        return EXIT_OK
    if args.action == "member":
        sp = core.load_space(args.space)
        a = _parse_alpha(args.alpha)
        delta = math.inf if args.delta is None else args.delta
        res = atoms_mod.member(sp, a, delta)
        if res is None:
            _print_json({"member": False, "refused": True}, args.format)
        else:
            _print_json({"member": True, "assignment": list(res.map)}, args.format)
        return EXIT_OK
    if args.action == "dissipate":
        spaces = [core.load_space(p) for p in args.spaces]
        a = _parse_alpha(args.alpha)
        ev = atoms_mod.detect_dissipation(spaces, a, args.delta)
        _print_json(
            {
                "accepted": ev.accepted,
                "delta": ev.delta,
                "atom_error": list(ev.atom_error),
                "max_small_bin": list(ev.max_small),
                "bin_counts": list(ev.bin_counts),
                "reason": ev.reason,
            },
            args.format,
        )
        return EXIT_OK
    raise core.InputError(f"unknown atoms action {args.action!r}")


def _cmd_spectral(args):
    if args.space == "interval":
        grid = functional.unit_interval_grid(args.size)
    elif args.space == "gaussian":
        grid = functional.gaussian_grid(args.size, args.sigma)
    else:
        raise core.InputError(f"unknown grid space {args.space!r}")
    if args.constant == "c22":
        value = functional.poincare_c22(grid)
        out = {"constant": "c22", "size": args.size, "value": value, "certificate": "estimate"}
    elif args.constant == "ls":
        reference = 1.0 / math.pi if args.space == "interval" else args.sigma
        rep = functional.log_sobolev_check(grid, reference, trials=args.trials, seed=args.seed)
        out = {
            "constant": "ls",
            "size": args.size,
            "candidate": reference,
            "max_violation": rep.max_violation,
            "lower_bound": rep.lower_bound,
            "certificate": "bound",
        }
    else:
        raise core.InputError(f"unknown constant {args.constant!r}")
    if args.convergence_table:
        rows = [["size", "c22"]]
        m = 64
        while m <= args.size:
            rows.append([m, functional.poincare_c22(
                functional.unit_interval_grid(m)
                if args.space == "interval"
                else functional.gaussian_grid(m, args.sigma)
            )])
            m *= 2
        writer = csv.writer(sys.stdout)
        for row in rows:
            writer.writerow(row)
        return EXIT_OK
    _print_json(out, args.format)
    return EXIT_OK


def _cmd_compare(args):
    sx = core.load_space(args.fileA)
    sy = core.load_space(args.fileB)
    out = {"lower": boxmetric.box_lower(sx, sy)}
    if sx.n * sy.n <= boxmetric.EXACT_MAX_CELLS:
        est = boxmetric.box_exact_small(sx, sy)
        out.update(upper=est.upper, box=est.upper, certificate="exact")
    else:
        out.update(upper=boxmetric.box_upper(sx, sy, seed=args.seed).upper, certificate="bound")
    for tag, a, b in (("x_dominates_y", sx, sy), ("y_dominates_x", sy, sx)):
        try:
            out[tag] = isinstance(order.dominates(a, b), order.DominationWitness)
        except core.SizeLimitError:
            out[tag] = "skipped (size)"
    table = {}
    for name, spn in (("A", sx), ("B", sy)):
        exact = spn.n <= observables.EXACT_MAX_POINTS
        mode = "exact" if exact else "heuristic"
        row = {
            "diam": spn.diam(),
            "variance": observables.variance(spn, mode=mode, seed=args.seed),
            "obsdiam_0.1": observables.obs_diam(spn, 0.1, mode=mode, seed=args.seed),
            "certificate": "exact" if exact else "estimate",
        }
        try:
            row["sep_quarters"] = observables.separation(spn, (0.25, 0.25))
        except core.SizeLimitError:
            row["sep_quarters"] = "skipped (size)"
        table[name] = row
    out["invariants"] = table
    _print_json(out, args.format)
    return EXIT_OK


# ---------------------------------------------------------------------------
# experiment plans


@dataclass
class ExperimentPlan:
    name: str
    seed: int = 0
    spaces: list = field(default_factory=list)       # {"id", "kind", "params"} or {"id", "path"}
    invariants: list = field(default_factory=list)   # {"space", "kind", ...}
    assertions: list = field(default_factory=list)   # {"row", "op", ...}

    @staticmethod
    def from_dict(d):
        return ExperimentPlan(
            name=d.get("name", "plan"),
            seed=int(d.get("seed", 0)),
            spaces=list(d.get("spaces", [])),
            invariants=list(d.get("invariants", [])),
            assertions=list(d.get("assertions", [])),
        )


def _row_key(spec):
    extras = {
        k: v
        for k, v in spec.items()
        if k not in ("space", "kind") and v is not None
    }
    blob = ",".join(f"{k}={_fmt_value(v)}" for k, v in sorted(extras.items()))
    return f"{spec['space']}:{spec['kind']}" + (f":{blob}" if blob else "")


def run_experiment(plan: ExperimentPlan, csv_path=None, json_path=None):
    """Execute a plan: build spaces, evaluate invariants, check assertions.

    Returns the report dict; CSV rows follow the plan order exactly.
    """
    built = {}
    for spec in plan.spaces:
        if "path" in spec:
            built[spec["id"]] = core.load_space(spec["path"])
        else:
            built[spec["id"]] = make_space(spec["kind"], spec.get("params", {}), plan.seed)
    rows = []
    values = {}
    for spec in plan.invariants:
        target = built[spec["space"]]
        kind = spec["kind"]
        if kind == "c22":
            value, cert = functional.poincare_c22(target), "estimate"
        elif kind == "ls_check":
            rep = functional.log_sobolev_check(
                target, spec["constant"], trials=spec.get("trials", 1000), seed=plan.seed
            )
            value, cert = rep.max_violation, "bound"
        elif kind == "gauss_domination_scale":
            value, cert = functional.gaussian_domination_scale(target), "estimate"
        elif kind == "gauss_obsdiam_formula":
            value, cert = observables.gaussian_obs_diam(
                spec.get("sigma", 1.0), spec["kappa"]
            ), "exact"
        else:
            kappa = spec.get("kappa")
            value, cert = evaluate_invariant(
                target,
                kind,
                kappa=[kappa] if isinstance(kappa, (int, float)) else kappa,
                p=spec.get("p", 2.0),
                exact=spec.get("exact", False),
                seed=plan.seed,
            )
        key = _row_key(spec)
        values[key] = value
        rows.append((spec["space"], kind, key, value, cert))

    failures = []
    for a in plan.assertions:
        op = a["op"]
        lhs = values[a["row"]]
        if op == "close":
            target = a["target"]
            tol = a.get("atol", 0.0) + a.get("rtol", 0.0) * abs(target)
            ok = abs(lhs - target) <= tol
        elif op == "gap_gt":
            ok = abs(lhs - values[a["other"]]) > a["threshold"]
        elif op == "le":
            ok = lhs <= a["target"] + a.get("atol", 0.0)
        elif op == "ge":
            ok = lhs >= a["target"] - a.get("atol", 0.0)
        else:
            raise core.InputError(f"unknown assertion op {op!r}")
        if not ok:
            failures.append({"assertion": a, "value": lhs})

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["space", "invariant", "row_key", "value", "certificate"])
    for space_id, kind, key, value, cert in rows:
        writer.writerow([space_id, kind, key, _fmt_value(value), cert])
    csv_text = buf.getvalue()
    report = {
        "name": plan.name,
        "seed": plan.seed,
        "rows": [
            {"space": s, "invariant": k, "row_key": key, "value": v, "certificate": c}
            for s, k, key, v, c in rows
        ],
        "failures": failures,
        "ok": not failures,
    }
    if csv_path:
        with open(csv_path, "w", encoding="utf-8") as fh:
            fh.write(csv_text)
    if json_path:
        with open(json_path, "w", encoding="utf-8") as fh:
            json.dump(_jsonable(report), fh, indent=2)
            fh.write("\n")
    report["csv"] = csv_text
    return report


def bundled_plan(name, seed=0):
    """Plans shipped with the tool; see the README for their claims."""
    if name == "gaussian_obsdiam":
        spaces = [
            {"id": f"gauss_dim{d}", "kind": "gaussian_sample",
             "params": {"n_points": 5000, "dim": d, "sigma": 1.0, "seed": seed}}
            for d in (1, 5)
        ]
        invariants, assertions = [], []
        for d in (1, 5):
            for kappa in (0.1, 0.3, 0.5):
                row = {"space": f"gauss_dim{d}", "kind": "obsdiam_projection", "kappa": kappa}
                invariants.append(row)
                target = observables.gaussian_obs_diam(1.0, kappa)
                assertions.append(
                    {"row": _row_key(row), "op": "close", "target": target, "rtol": 0.02}
                )
        return ExperimentPlan("gaussian_obsdiam", seed, spaces, invariants, assertions)
    if name == "cube_vs_gaussian":
        spaces = [
            {"id": "interval", "kind": "grid_interval", "params": {"m": 512}},
            {"id": "gaussian", "kind": "grid_gaussian", "params": {"m": 512}},
        ]
        inv_scale = {"space": "interval", "kind": "gauss_domination_scale"}
        inv_ci = {"space": "interval", "kind": "c22"}
        inv_cg = {"space": "gaussian", "kind": "c22"}
        invariants = [inv_scale, inv_ci, inv_cg]
        assertions = [
            {"row": _row_key(inv_scale), "op": "close",
             "target": 1.0 / math.sqrt(2 * math.pi), "atol": 1e-4},
            {"row": _row_key(inv_ci), "op": "close", "target": 1.0 / math.pi, "atol": 1e-3},
            {"row": _row_key(inv_cg), "op": "close", "target": 1.0, "atol": 1e-3},
            {"row": _row_key(inv_scale), "op": "gap_gt", "other": _row_key(inv_ci),
             "threshold": 0.08},
        ]
        return ExperimentPlan("cube_vs_gaussian", seed, spaces, invariants, assertions)
    raise core.InputError(f"unknown bundled plan {name!r}")


def _cmd_run(args):
    if args.plan.endswith(".json"):
        try:
            with open(args.plan, encoding="utf-8") as fh:
                plan = ExperimentPlan.from_dict(json.load(fh))
        except (OSError, json.JSONDecodeError) as e:
            raise core.InputError(f"cannot read plan: {e}") from e
        if args.seed is not None:
            plan.seed = args.seed
    else:
        plan = bundled_plan(args.plan, seed=args.seed or 0)
    report = run_experiment(plan, csv_path=args.csv, json_path=args.json_out)
    sys.stdout.write(report["csv"])
    if report["failures"]:
        for f in report["failures"]:
            print(f"ASSERTION FAILED: {_jsonable(f)}", file=sys.stderr)
        return EXIT_ASSERTION
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


def build_parser():
    ap = argparse.ArgumentParser(prog="mmslab", description=__doc__)
    ap.add_argument("--seed", type=int, default=None, help="global RNG seed")
    ap.add_argument("--tol", type=float, default=None, help="reserved tolerance override")
    ap.add_argument("--threads", type=int, default=1,
                    help="accepted for compatibility; execution is sequential")
    ap.add_argument("--format", choices=("json", "csv"), default="json")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a space and write it as JSON")
    g.add_argument("kind")
    g.add_argument("--params", help='JSON dict of generator parameters, e.g. \'{"m": 5}\'')
    g.add_argument("-o", "--output", required=True)
    g.set_defaults(func=_cmd_gen)

    i = sub.add_parser("invariant", help="evaluate an invariant of a space file")
    i.add_argument("file")
    i.add_argument("--kind", required=True,
                   choices=("obsdiam", "sep", "var", "pvar", "diam", "obsdiam_projection"))
    i.add_argument("--kappa", help="comma-separated thresholds")
    i.add_argument("--p", type=float, default=2.0)
    i.add_argument("--exact", action="store_true")
    i.set_defaults(func=_cmd_invariant)

    b = sub.add_parser("box", help="box-distance bounds between two space files")
    b.add_argument("fileA")
    b.add_argument("fileB")
    b.add_argument("--exact", action="store_true")
    b.set_defaults(func=_cmd_box)

    d = sub.add_parser("dominates", help="search for a Lipschitz-order witness")
    d.add_argument("fileX")
    d.add_argument("fileY")
    d.set_defaults(func=_cmd_dominates)

    a = sub.add_parser("atoms", help="atom-vector algebra operations")
    a.add_argument("action", choices=("product", "contract", "member", "dissipate"))
    a.add_argument("--alpha", required=True, help="comma list or AtomVector JSON path")
    a.add_argument("--beta", help="comma list or AtomVector JSON path")
    a.add_argument("--space", help="space file for membership")
    a.add_argument("--spaces", nargs="*", default=[], help="sequence of space files")
    a.add_argument("--delta", type=float)
    a.set_defaults(func=_cmd_atoms)

    s = sub.add_parser("spectral", help="spectral constants of 1-D grid spaces")
    s.add_argument("--space", choices=("interval", "gaussian"), required=True)
    s.add_argument("--size", type=int, default=512)
    s.add_argument("--sigma", type=float, default=1.0)
    s.add_argument("--constant", choices=("c22", "ls"), default="c22")
    s.add_argument("--trials", type=int, default=1000)
    s.add_argument("--convergence-table", action="store_true")
    s.set_defaults(func=_cmd_spectral)

    c = sub.add_parser("compare", help="box bounds, dominations and invariants side by side")
    c.add_argument("fileA")
    c.add_argument("fileB")
    c.set_defaults(func=_cmd_compare)

    r = sub.add_parser("run", help="run an experiment plan (bundled name or JSON file)")
    r.add_argument("plan")
    r.add_argument("--csv", help="write the CSV table here")
    r.add_argument("--json-out", help="write the JSON report here")
    r.set_defaults(func=_cmd_run)
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.seed is None:
        args.seed = 0
    try:
        return args.func(args)
    except core.SizeLimitError as e:
        print(f"size limit: {e}", file=sys.stderr)
        return EXIT_SIZE
    except core.InputError as e:
        print(f"input error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except FileNotFoundError as e:
        print(f"input error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
