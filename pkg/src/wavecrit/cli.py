"""Command-line driver.

Exit codes:
    0  success
    2  configuration error (bad arguments, malformed or invalid config)
    3  numerical failure (truncated run, no fixed point, horizon exceeded)
    4  acceptance failure (a verification check did not pass)
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time
import warnings
from fractions import Fraction
from pathlib import Path

import jsonschema
import numpy as np

from . import diagnostics, exponents, fileio, gronwall, littlewood_paley, propagator, solver, spectral

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_ACCEPT = 0, 2, 3, 4


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


_NUM = {"type": "number"}
_POINT = {"type": "array", "items": _NUM}

RUN_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["dim", "n", "box", "dt", "horizon", "initial"],
    "properties": {
        "dim": {"type": "integer", "minimum": 1, "maximum": 6},
        "n": {"type": "integer", "minimum": 4},
        "box": {"type": "number", "exclusiveMinimum": 0},
        "dt": {"type": "number", "exclusiveMinimum": 0},
        "quad_nodes": {"type": "integer", "minimum": 1, "maximum": 8},
        "picard_tol": {"type": "number", "exclusiveMinimum": 0},
        "picard_max": {"type": "integer", "minimum": 1},
        "horizon": {"type": "number", "exclusiveMinimum": 0},
        "dealias": {"type": "boolean"},
        "sign": {"enum": [1, -1]},
        "nonlinear": {"type": "boolean"},
        "morawetz_center": _POINT,
        "seed": {"type": "integer"},
        "initial": {
            "type": "object",
            "additionalProperties": False,
            "required": ["kind"],
            "properties": {
                "kind": {"enum": ["gaussian", "mode", "file"]},
                "params": {"type": "object"},
            },
        },
        "outputs": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "series_csv": {"type": "string"},
                "diagnostics_csv": {"type": "string"},
                "summary_json": {"type": "string"},
                "snapshot_dir": {"type": "string"},
                "snapshots_every": {"type": "integer", "minimum": 1},
            },
        },
    },
}

_INITIAL_PARAMS = {
    "gaussian": {"amplitude", "width", "center", "velocity_amplitude"},
    "mode": {"k", "amplitude", "phase", "velocity_amplitude"},
    "file": {"u", "ut"},
}

SERIES_COLUMNS = ["t", "energy", "hs_crit", "hs_crit_minus1_ut", "l_dplus1_accum", "morawetz_accum",
                  "picard_iters", "residual"]


# config handling

def load_config(path):
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise CliError(f"cannot read config: {exc}", EXIT_CONFIG) from exc
    except json.JSONDecodeError as exc:
        raise CliError(f"malformed JSON in {path}: {exc}", EXIT_CONFIG) from exc
    try:
        jsonschema.validate(cfg, RUN_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise CliError(f"invalid config at {where}: {exc.message}", EXIT_CONFIG) from exc
    kind = cfg["initial"]["kind"]
    unknown = set(cfg["initial"].get("params", {})) - _INITIAL_PARAMS[kind]
    if unknown:
        raise CliError(f"unknown initial params for {kind!r}: {sorted(unknown)}", EXIT_CONFIG)
    return cfg


def config_hash(cfg) -> str:
    return hashlib.sha256(json.dumps(cfg, sort_keys=True, separators=(",", ":")).encode()).hexdigest()


def build_grid(cfg):
    try:
        return spectral.GridSpec(cfg["dim"], cfg["n"], float(cfg["box"]))
    except ValueError as exc:
        raise CliError(f"invalid grid: {exc}", EXIT_CONFIG) from exc


def build_solver_config(cfg):
    outputs = cfg.get("outputs", {})
    try:
        return solver.SolverConfig(
            dt=float(cfg["dt"]), T=float(cfg["horizon"]),
            quad_nodes=cfg.get("quad_nodes", 3),
            picard_tol=float(cfg.get("picard_tol", 1e-12)),
            picard_max=cfg.get("picard_max", 50),
            dealias=cfg.get("dealias", True),
            sign=cfg.get("sign", 1),
            nonlinear=cfg.get("nonlinear", True),
            snapshot_every=outputs.get("snapshots_every", 1),
            morawetz_center=tuple(cfg["morawetz_center"]) if "morawetz_center" in cfg else None,
        )
    except solver.ConfigError as exc:
        raise CliError(str(exc), EXIT_CONFIG) from exc


def _resolve(base, p):
    p = Path(p)
    return p if p.is_absolute() else Path(base) / p


def build_initial(cfg, grid, base="."):
    spec = cfg["initial"]
    params = spec.get("params", {})
    kind = spec["kind"]
    try:
        if kind == "gaussian":
            center = params.get("center")
            if center is not None and len(center) != grid.d:
                raise CliError("gaussian center has the wrong dimension", EXIT_CONFIG)
            u = spectral.gaussian(grid, center, params.get("width", 1.0), params.get("amplitude", 1.0))
            ut = u * (params.get("velocity_amplitude", 0.0) / max(params.get("amplitude", 1.0), 1e-300))
            return spectral.StatePair(u, ut)
        if kind == "mode":
            k = params.get("k", [1] + [0] * (grid.d - 1))
            if len(k) != grid.d:
                raise CliError("mode wave vector has the wrong dimension", EXIT_CONFIG)
            u = spectral.plane_mode(grid, k, params.get("amplitude", 1.0), params.get("phase", 0.0))
            w = 2 * math.pi * math.sqrt(sum(x * x for x in k)) / grid.L
            ut = spectral.plane_mode(grid, k, params.get("velocity_amplitude", 0.0) * w, params.get("phase", 0.0))
            return spectral.StatePair(u, ut)
        if "u" not in params:
            raise CliError("file initial data needs params.u", EXIT_CONFIG)
        u = fileio.read_snapshot(_resolve(base, params["u"]))
        ut = fileio.read_snapshot(_resolve(base, params["ut"])) if "ut" in params else spectral.RealField(
            u.grid, np.zeros(u.grid.shape))
        if u.grid != grid or ut.grid != grid:
            raise CliError("snapshot grid does not match the config grid", EXIT_CONFIG)
        return spectral.StatePair(u, ut)
    except (OSError, ValueError) as exc:
        raise CliError(f"cannot build initial data: {exc}", EXIT_CONFIG) from exc


# simulate

def run_simulation(cfg, base="."):
    """Run a validated config; returns (trajectory, series rows, diagnostics rows, summary)."""
    grid = build_grid(cfg)
    scfg = build_solver_config(cfg)
    state0 = build_initial(cfg, grid, base)
    start = time.perf_counter()
    traj = solver.evolve(state0, scfg)
    series = [[r[c] for c in SERIES_COLUMNS] for r in traj.records]
    mw = {round(r["t"], 12): r["morawetz_accum"] for r in traj.records}
    diag_rows, ap_records = [], []
    for t, st in zip(traj.times, traj.states):
        try:
            rec = diagnostics.almost_periodicity_record(st, t)
        except diagnostics.UndefinedSignal:
            diag_rows.append([t, "", *([""] * grid.d), "", "", diagnostics.energy(st), mw.get(round(t, 12), "")])
            continue
        ap_records.append(rec)
        diag_rows.append([t, rec.N_t, *rec.x_t.tolist(), rec.C_eta[0.1], rec.C_eta[0.01],
                          diagnostics.energy(st), mw.get(round(t, 12), "")])
    wall = time.perf_counter() - start
    last = traj.records[-1]
    verdict = (diagnostics.classify_scenario(ap_records, traj.truncated)
               if len(ap_records) >= 10 else "insufficient-records")
    e0 = traj.records[0]["energy"]
    summary = {
        "config_hash": config_hash(cfg),
        "wall_time_s": wall,
        "truncated": traj.truncated,
        "reason": traj.reason,
        "final_time": last["t"],
        "steps": len(traj.records) - 1,
        "final_norms": {k: last[k] for k in ("energy", "hs_crit", "hs_crit_minus1_ut", "l_dplus1_accum",
                                              "morawetz_accum")},
        "critical_sup": solver.sobolev_sup(traj),
        "verdict": verdict,
        "checks": {
            "energy_relative_drift": abs(last["energy"] - e0) / abs(e0) if e0 else abs(last["energy"]),
            "critical_bound_finite": math.isfinite(solver.sobolev_sup(traj)),
        },
    }
    return traj, series, diag_rows, summary


def diagnostics_header(d):
    return ["t", "N_t", *[f"x_t_{a}" for a in range(d)], "C_eta_0.1", "C_eta_0.01", "energy", "morawetz_accum"]


def cmd_simulate(args):
    cfg = load_config(args.config)
    base = Path(args.config).resolve().parent
    out = Path(args.out_dir) if args.out_dir else base
    traj, series, diag, summary = run_simulation(cfg, base)
    outputs = cfg.get("outputs", {})
    fileio.write_csv(_resolve(out, outputs.get("series_csv", "series.csv")), SERIES_COLUMNS, series)
    fileio.write_csv(_resolve(out, outputs.get("diagnostics_csv", "diagnostics.csv")),
                     diagnostics_header(cfg["dim"]), diag)
    if "snapshot_dir" in outputs:
        folder = _resolve(out, outputs["snapshot_dir"])
        for i, st in enumerate(traj.states):
            fileio.write_snapshot(folder / f"u_{i:05d}.bin", st.u)
            fileio.write_snapshot(folder / f"ut_{i:05d}.bin", st.ut)
    fileio.write_json(_resolve(out, outputs.get("summary_json", "summary.json")), summary)
    print(f"steps={summary['steps']} truncated={summary['truncated']} verdict={summary['verdict']} "
          f"energy_drift={summary['checks']['energy_relative_drift']:.3e}")
    if traj.truncated:
        print(f"run truncated: {traj.reason}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_scatter(args):
    cfg = load_config(args.config)
    times = sorted(args.times)
    if times[-1] > cfg["horizon"] + 1e-12:
        raise CliError("scatter times exceed the configured horizon", EXIT_CONFIG)
    grid = build_grid(cfg)
    scfg = build_solver_config(cfg)
    state0 = build_initial(cfg, grid, Path(args.config).resolve().parent)
    traj = solver.evolve(state0, scfg)
    try:
        _, diffs = solver.scattering_extract(traj, times)
    except solver.UnavailableError as exc:
        raise CliError(str(exc), EXIT_NUMERIC) from exc
    monotone = all(b < a for a, b in zip(diffs, diffs[1:]))
    ratio = diffs[-1] / diffs[0] if diffs and diffs[0] > 0 else 0.0
    report = {"times": times, "differences": diffs, "monotone": monotone, "final_over_first": ratio,
              "threshold": args.ratio, "passed": monotone and ratio <= args.ratio}
    if args.json:
        fileio.write_json(args.json, report)
    for (a, b), dval in zip(zip(times, times[1:]), diffs):
        print(f"{a:g}->{b:g}: {dval:.6e}")
    print(f"monotone={monotone} final/first={ratio:.4f} threshold={args.ratio}")
    return EXIT_OK if report["passed"] else EXIT_ACCEPT


# exponent calculus

def _claims(path):
    try:
        return exponents.load_claims(path)
    except (OSError, json.JSONDecodeError, exponents.ClaimFormatError) as exc:
        raise CliError(f"cannot load claims: {exc}", EXIT_CONFIG) from exc


def cmd_exponents(args):
    claims = _claims(args.claims)
    hi = args.max_dim if args.max_dim is not None else args.dim
    reports = []
    try:
        for d in range(args.dim, hi + 1):
            reports.append(exponents.verify_claims(d, claims))
    except exponents.DomainError as exc:
        raise CliError(str(exc), EXIT_CONFIG) from exc
    for rep in reports:
        print(f"d={rep.d}")
        for r in rep.results:
            print(f"  {r.id:<28} {'pass' if r.passed else 'FAIL'}  residual={r.residual}  {r.formula}")
    if args.json:
        fileio.write_json(args.json, [rep.as_dict() for rep in reports])
    failed = [(rep.d, r.id) for rep in reports for r in rep.failures]
    print(f"{sum(len(r.results) for r in reports)} checks, {len(failed)} failures")
    return EXIT_ACCEPT if failed else EXIT_OK


def _exponent_arg(text):
    text = text.strip().lower()
    if text in ("inf", "infinity"):
        return exponents.INF
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational exponent: {text}") from exc


def cmd_admissible(args):
    d = args.dim
    try:
        s = args.s if args.s is not None else exponents.admissible_regularity(args.q, args.r, d)
        pair = exponents.AdmissiblePair(args.q, args.r, s, d)
    except (ValueError, exponents.DomainError) as exc:
        raise CliError(str(exc), EXIT_CONFIG) from exc
    ok = exponents.is_wave_admissible(pair)
    print(f"(q, r) = ({args.q}, {args.r}), d = {d}, s = {s}")
    print(f"decay slack = {pair.decay_slack()}, scaling residual = {pair.scaling_residual()}")
    print("admissible" if ok else "not admissible")
    return EXIT_OK if ok else EXIT_ACCEPT


# harmonic analysis

def bernstein_rows(d, n, trials, rng, pq=((2, 4), (1, 2), (2, math.inf)), s_values=(1.0, 2.0)):
    grid = spectral.GridSpec(d, n, 2 * math.pi)
    dyadics = [2.0 ** k for k in range(5) if 2.0 ** k <= n / 4]
    rows = []
    for _ in range(trials):
        f = spectral.random_field(grid, rng, kmax=n // 4)
        for N in dyadics:
            for p, q in pq:
                r = littlewood_paley.bernstein_ratio(f, N, p, q, 0.0)
                if r is not None:
                    rows.append([N, p, q, 0.0, r["lebesgue"]])
            for s in s_values:
                r = littlewood_paley.bernstein_ratio(f, N, 2, 2, s)
                if r is not None:
                    rows.append([N, 2, 2, s, r["deriv_up"]])
                    rows.append([N, 2, 2, -s, r["deriv_down"]])
    return rows


def cmd_bernstein(args):
    try:
        rows = bernstein_rows(args.dim, args.n, args.trials, np.random.default_rng(args.seed))
    except ValueError as exc:
        raise CliError(str(exc), EXIT_CONFIG) from exc
    fileio.write_csv(args.out, ["N", "p", "q", "s", "ratio"], rows)
    worst = max(r[-1] for r in rows) if rows else float("nan")
    print(f"{len(rows)} ratios written to {args.out}; max ratio {worst:.4f}")
    return EXIT_OK


def cmd_decay(args):
    try:
        grid = spectral.GridSpec(args.dim, args.n, args.box)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_CONFIG) from exc
    g = spectral.gaussian(grid, width=args.width)
    times = np.geomspace(args.tmax / 8, args.tmax, args.points)
    try:
        slope, norms = propagator.dispersive_decay_fit(g, args.p, times, return_norms=True)
    except propagator.HorizonError as exc:
        raise CliError(str(exc), EXIT_NUMERIC) from exc
    fileio.write_csv(args.out, ["t", "norm"], zip(times.tolist(), norms.tolist()))
    target = -(args.dim - 1) / 2 * (1 - 2 / args.p)
    print(f"slope={slope:.6f} target={target:.6f}")
    return EXIT_OK


# recursions

def _write_sequence(path, y, bound):
    fileio.write_csv(path, ["k", "x_k", "bound_k"], ([k, y[k], bound[k]] for k in range(len(y))))


def cmd_gronwall(args):
    try:
        params = gronwall.GronwallParams(args.gamma, args.gamma2, args.C, args.eta, args.rho)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_CONFIG) from exc
    try:
        y = gronwall.maximal_sequence(params, args.K)
    except gronwall.NoFixedPoint as exc:
        raise CliError(str(exc), EXIT_NUMERIC) from exc
    bound = gronwall.decay_bound(y, params)
    _write_sequence(args.out, y, bound)
    holds = gronwall.bound_holds(y, params.C, params.rho)
    exp_ = gronwall.certified_exponent(y, params.C, params.rho)
    print(f"hypothesis=True bound_holds={holds} exponent={exp_:.6f} rate={gronwall.asymptotic_rate(y):.6f}")
    return EXIT_OK if holds else EXIT_ACCEPT


def cmd_decay_recursion(args):
    try:
        fit = gronwall.decay_recursion_fixpoint(args.dim, Fraction(args.R), eta=args.eta, K=args.K,
                                                C_prime=args.C_prime)
    except (exponents.DomainError, gronwall.Inapplicable, ValueError) as exc:
        raise CliError(str(exc), EXIT_CONFIG) from exc
    except gronwall.NoFixedPoint as exc:
        raise CliError(str(exc), EXIT_NUMERIC) from exc
    _write_sequence(args.out, fit.sequence, fit.bound)
    print(f"gamma={fit.gamma:.6f} gamma2={fit.gamma2:.6f} rho={fit.rho:g} eta_prime={fit.eta_prime:.3e} "
          f"exponent={fit.exponent:.6f} rate={fit.rate:.6f} bound_holds={fit.bound_holds}")
    return EXIT_OK if fit.bound_holds else EXIT_ACCEPT


# batch verification

def random_gronwall_params(rng):
    """An admissible tuple drawn uniformly over a box, eta scaled into the allowed range."""
    gamma = rng.uniform(0.2, 4.0)
    gamma2 = rng.uniform(0.2, 4.0)
    rho = rng.uniform(0.05, 0.95) * gamma
    C = rng.uniform(0.1, 10.0)
    probe = gronwall.GronwallParams(gamma, gamma2, C, 1.0, rho)
    eta = rng.uniform(0.01, 1.0) * float(probe.threshold())
    return gronwall.GronwallParams(gamma, gamma2, C, eta, rho)


def gronwall_sweep(rng, count=100, K=40):
    failures = []
    for i in range(count):
        params = random_gronwall_params(rng)
        y = gronwall.maximal_sequence(params, K)
        if not (gronwall.bound_holds(y, params.C, params.rho) and gronwall.gronwall_recursion_holds(y, params)):
            failures.append(f"tuple {i}: {params}")
    return failures


def propagator_sweep(rng, count=10):
    grid = spectral.GridSpec(2, 16, 2 * math.pi)
    worst = 0.0
    for _ in range(count):
        g = spectral.random_field(grid, rng)
        h = spectral.random_field(grid, rng)
        g = g * (1 / spectral.lebesgue_norm(g, 2))
        h = h * (1 / spectral.lebesgue_norm(h, 2))
        t1, t2 = rng.uniform(-10, 10, 2)
        worst = max(worst, propagator.double_duhamel_identity_check(g, h, t1, t2))
    return worst


def verify_all(lo, hi, claims, seed=0, gronwall_count=100):
    rng = np.random.default_rng(seed)
    report = {"dims": {}, "checks": {}, "warnings": []}
    if lo > hi:
        msg = f"empty dimension range {lo}..{hi}; claim checks pass vacuously"
        warnings.warn(msg, stacklevel=2)
        report["warnings"].append(msg)
    for d in range(lo, hi + 1):
        rep = exponents.verify_claims(d, claims)
        entry = {"failed_claims": [r.id for r in rep.failures], "claims": len(rep.results)}
        lo_R, hi_R = exponents.decay_R_window(d)
        rho = Fraction(d - 4, 2)
        R_mid = (lo_R + hi_R) / 2
        gamma, _ = gronwall.decay_rates(d, R_mid)
        if rho < gamma:
            fit = gronwall.decay_recursion_fixpoint(d, R_mid)
            entry["decay_recursion"] = fit.bound_holds and abs(fit.exponent - float(rho)) <= 0.05
        else:
            entry["decay_recursion"] = None
        entry["passed"] = not entry["failed_claims"] and entry["decay_recursion"] is not False
        report["dims"][d] = entry
    g_fail = gronwall_sweep(rng, gronwall_count)
    report["checks"]["gronwall_sweep"] = {"tuples": gronwall_count, "failures": g_fail, "passed": not g_fail}
    resid = propagator_sweep(rng)
    report["checks"]["double_duhamel"] = {"max_residual": resid, "passed": resid <= 1e-12}
    report["passed"] = all(e["passed"] for e in report["dims"].values()) and all(
        c["passed"] for c in report["checks"].values())
    return report


def cmd_verify_all(args):
    lo, hi = args.dim_range
    if lo < 6 and lo <= hi:
        raise CliError("dimension range must start at 6 or above", EXIT_CONFIG)
    claims = _claims(args.claims)
    start = time.perf_counter()
    report = verify_all(lo, hi, claims, args.seed)
    report["wall_time_s"] = time.perf_counter() - start
    for w in report["warnings"]:
        print(f"warning: {w}", file=sys.stderr)
    for d, e in report["dims"].items():
        if not e["passed"]:
            print(f"d={d}: FAIL claims={e['failed_claims']} decay_recursion={e['decay_recursion']}")
    for name, c in report["checks"].items():
        print(f"{name}: {'pass' if c['passed'] else 'FAIL'}")
    print(f"dims {lo}..{hi}: {'all pass' if report['passed'] else 'failures'} "
          f"({report['wall_time_s']:.2f} s)")
    if args.json:
        fileio.write_json(args.json, report)
    return EXIT_OK if report["passed"] else EXIT_ACCEPT


# parser

def build_parser():
    p = argparse.ArgumentParser(prog="wavecrit", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--seed", type=int, default=0, help="seed for every randomized check")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("exponents", help="check the exponent claim database")
    s.add_argument("--dim", type=int, required=True)
    s.add_argument("--max-dim", type=int)
    s.add_argument("--claims", help="alternative claims JSON")
    s.add_argument("--json", help="write the report as JSON to this path")
    s.set_defaults(func=cmd_exponents)

    s = sub.add_parser("admissible", help="test one exponent pair")
    s.add_argument("--dim", type=int, required=True)
    s.add_argument("--q", type=_exponent_arg, required=True)
    s.add_argument("--r", type=_exponent_arg, required=True)
    s.add_argument("--s", type=_exponent_arg)
    s.set_defaults(func=cmd_admissible)

    s = sub.add_parser("simulate", help="run the nonlinear solver from a JSON config")
    s.add_argument("--config", required=True)
    s.add_argument("--out-dir", help="directory for outputs (default: next to the config)")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("scatter", help="Cauchy differences of pulled-back states")
    s.add_argument("--config", required=True)
    s.add_argument("--times", type=float, nargs="+", default=[2.0, 4.0, 6.0, 8.0])
    s.add_argument("--ratio", type=float, default=0.1, help="required final/first difference ratio")
    s.add_argument("--json")
    s.set_defaults(func=cmd_scatter)

    s = sub.add_parser("bernstein", help="Bernstein ratio sweep on random band-limited fields")
    s.add_argument("--dim", type=int, default=2)
    s.add_argument("--n", type=int, default=64)
    s.add_argument("--trials", type=int, default=100)
    s.add_argument("--out", default="bernstein.csv")
    s.set_defaults(func=cmd_bernstein)

    s = sub.add_parser("decay", help="fit the free-wave L^p decay rate")
    s.add_argument("--dim", type=int, required=True)
    s.add_argument("--p", type=float, required=True)
    s.add_argument("--tmax", type=float, required=True)
    s.add_argument("--n", type=int, default=512)
    s.add_argument("--box", type=float, default=200.0)
    s.add_argument("--width", type=float, default=1.0)
    s.add_argument("--points", type=int, default=8)
    s.add_argument("--out", default="decay.csv")
    s.set_defaults(func=cmd_decay)

    s = sub.add_parser("gronwall", help="maximal solution of the discrete Gronwall recursion")
    s.add_argument("--gamma", type=float, required=True)
    s.add_argument("--gamma2", type=float, required=True)
    s.add_argument("--C", type=float, required=True)
    s.add_argument("--eta", type=float, required=True)
    s.add_argument("--rho", type=float, required=True)
    s.add_argument("--K", type=int, default=40)
    s.add_argument("--out", default="gronwall.csv")
    s.set_defaults(func=cmd_gronwall)

    s = sub.add_parser("decay-recursion", help="frequency-decay recursion fixed point")
    s.add_argument("--dim", type=int, required=True)
    s.add_argument("--R", required=True, help="Lebesgue exponent inside the window, e.g. 7/2")
    s.add_argument("--eta", type=float)
    s.add_argument("--K", type=int, default=60)
    s.add_argument("--C-prime", dest="C_prime", type=float, default=1.0)
    s.add_argument("--out", default="decay_recursion.csv")
    s.set_defaults(func=cmd_decay_recursion)

    s = sub.add_parser("verify-all", help="batch verification over a dimension range")
    s.add_argument("--dim-range", type=int, nargs=2, default=[6, 16], metavar=("LO", "HI"))
    s.add_argument("--claims")
    s.add_argument("--json")
    s.set_defaults(func=cmd_verify_all)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (solver.ContractionFailure, solver.StabilityError, FloatingPointError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
