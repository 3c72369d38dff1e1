"""
Command-line front end.

    zctiming generate  --zc -N 839 --mu 140
    zctiming autocorr  -N 839 --mu 140 -W 16 --delta-lambda -1:1:0.01
    zctiming spectrum  -N 839 --mu 367 -W 20 --format both --out s.csv
    zctiming analyze   --config scenario.json
    zctiming simulate  --config scenario.json --seed 7
    zctiming select    -N 839 -W 16 --candidates 140,367
    zctiming --repro fig6 [--mu 367]

Parameter precedence: preset < ``--config`` JSON < explicit flags.
Exit status: 0 ok, 2 invalid arguments, 3 numerical failure.
"""

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import __version__
from .analytics import DetectionScenario, db_to_linear, linear_to_db, timing_distribution
from .correlation import autocorr_mag_sq_closed, autocorr_offset
from .quadrature import QuadratureError
from .roots import DEFAULT_FREQ_BOUND, rank_roots
from .sequences import DEFAULT_PN_DEGREE, DEFAULT_PN_TAPS, pn_generate, zc_generate
from .simulation import SimulationConfig, run_experiment
from .spectrum import ABOVE_HALF, AT_HALF, critical_table, error_floor, timing_spectrum

EXIT_USAGE = 2
EXIT_NUMERIC = 3

_SNR_SWEEP = [-25.0, -20.0, -15.0, -10.0, -5.0, 0.0]
_DL_SWEEP = [0.0, 0.3, 0.5, 0.6, 0.7]

PRESETS = {
    "table1": ("spectrum", dict(N=839, mu=140, W=16, table=True)),
    "fig3": ("autocorr", dict(N=839, mu=140, W=16, delta_lambda="-1:1:0.01")),
    "fig4": ("spectrum", dict(N=839, mu=140, W=16)),
    "fig6": ("analyze", dict(N=839, mu=140, W=16, delta_lambda=0.5, eta_db=-15.0)),
    "fig7": ("analyze", dict(N=839, mu=140, W=16, delta_lambda=_DL_SWEEP, eta_db=_SNR_SWEEP)),
    "fig8": ("spectrum", dict(N=839, mu=367, W=20)),
    "fig9": ("analyze", dict(N=839, mu=367, W=20, delta_lambda=0.5, eta_db=-15.0)),
    "fig10": ("analyze", dict(N=839, mu=367, W=20, delta_lambda=_DL_SWEEP, eta_db=_SNR_SWEEP)),
    "fig11": ("spectrum", dict(N=839, mu=29, W=20)),
    "fig12": ("analyze", dict(N=839, mu=29, W=20, delta_lambda=0.5, eta_db=-15.0)),
    "fig13": ("analyze", dict(N=839, mu=29, W=20, delta_lambda=_DL_SWEEP, eta_db=_SNR_SWEEP)),
}

# keys accepted in a scenario / experiment JSON file
_SCENARIO_KEYS = {"N", "mu", "W", "delta_lambda", "eta_db", "eta"}
_SIM_KEYS = {"N_CP", "trials", "seed", "kappa_mode", "sequence", "random_phase"}
_OTHER_KEYS = {"candidates", "freq_bound", "degree", "taps", "length", "table", "kind"}


class UsageError(ValueError):
    pass


# --------------------------------------------------------------------------- output


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)) or hasattr(v, "numerator"):
        return format(float(v), ".17g")
    return str(v)


def csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def json_text(obj):
    return json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n"


def _json_default(v):
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.floating) or hasattr(v, "numerator"):
        return float(v)
    raise TypeError(f"not JSON serializable: {type(v)}")


def write_atomic(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit(args, csv_part, json_part):
    """Write CSV and/or JSON per ``--format`` / ``--out``."""
    fmt = args.format
    out = args.out
    if fmt == "both" and out:
        write_atomic(out, csv_part)
        write_atomic(Path(out).with_suffix(".json"), json_part)
    elif out:
        write_atomic(out, csv_part if fmt == "csv" else json_part)
    else:
        if fmt in ("csv", "both"):
            sys.stdout.write(csv_part)
        if fmt in ("json", "both"):
            sys.stdout.write(json_part)


# --------------------------------------------------------------------------- params


def parse_values(text):
    """Parse ``"a,b,c"``, ``"start:stop:step"`` (stop inclusive) or a number."""
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    if isinstance(text, (int, float)):
        return [float(text)]
    text = str(text).strip()
    try:
        if ":" in text:
            start, stop, step = (float(p) for p in text.split(":"))
            if step <= 0:
                raise UsageError(f"range step must be positive in {text!r}")
            n = int(math.floor((stop - start) / step + 1e-9)) + 1
            return [round(start + i * step, 12) for i in range(max(n, 0))]
        return [float(p) for p in text.split(",") if p.strip()]
    except ValueError as exc:
        raise UsageError(f"cannot parse value list {text!r}: {exc}") from None


def load_config(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"config {path} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError(f"config {path} must hold a JSON object")
    unknown = set(data) - _SCENARIO_KEYS - _SIM_KEYS - _OTHER_KEYS
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
    return data


def resolve(args):
    """Merge preset, config file and flags into one parameter dict."""
    params = {}
    if args.repro:
        if args.repro not in PRESETS:
            raise UsageError(f"unknown preset {args.repro!r}; choose from {', '.join(PRESETS)}")
        params.update(PRESETS[args.repro][1])
    if args.config:
        cfg = load_config(args.config)
        # a scenario block echoed by `analyze` carries linear eta as well
        eta = cfg.pop("eta", None)
        if eta is not None and "eta_db" not in cfg:
            cfg["eta_db"] = linear_to_db(float(eta))
        params.update(cfg)
    flags = {
        "N": args.N, "mu": args.mu, "W": args.W, "delta_lambda": args.delta_lambda,
        "eta_db": args.snr_db, "trials": args.trials, "seed": args.seed,
    }
    for name in ("N_CP", "kappa_mode", "sequence", "random_phase", "candidates",
                 "freq_bound", "degree", "taps", "table", "kind"):
        flags[name] = getattr(args, name, None)
    params.update({k: v for k, v in flags.items() if v is not None})
    return params


def _require(params, *names):
    missing = [n for n in names if params.get(n) is None]
    if missing:
        raise UsageError(f"missing required parameter(s): {', '.join(missing)}")


def _int(params, name):
    v = params[name]
    try:
        iv = int(v)
    except (TypeError, ValueError):
        raise UsageError(f"{name} must be an integer, got {v!r}") from None
    if iv != float(v):
        raise UsageError(f"{name} must be an integer, got {v!r}")
    return iv


def _check(fn, *a, **kw):
    """Run a constructor, re-raising validation failures as usage errors."""
    try:
        return fn(*a, **kw)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _sweep(params):
    dls = parse_values(params["delta_lambda"])
    snrs = parse_values(params["eta_db"])
    if not dls or not snrs:
        raise UsageError("delta_lambda and eta_db need at least one value")
    return dls, snrs


def _scenario(params, dl, snr):
    N, mu, W = _int(params, "N"), _int(params, "mu"), _int(params, "W")
    return _check(DetectionScenario, N, mu, W, dl, db_to_linear(snr))


# --------------------------------------------------------------------------- commands


def cmd_generate(args, params):
    kind = params.get("kind") or "zc"
    if kind == "pn":
        length = params.get("length", params.get("N"))
        _require({"length": length}, "length")
        degree = int(params.get("degree", DEFAULT_PN_DEGREE))
        taps = params.get("taps", DEFAULT_PN_TAPS)
        if isinstance(taps, str):
            taps = [int(t) for t in taps.split(",")]
        seq = _check(pn_generate, degree, taps, int(length))
        samples = np.asarray(seq)
        meta = {"kind": "pn", "degree": degree, "taps": list(seq.taps), "length": int(length)}
    else:
        _require(params, "N", "mu")
        seq = _check(zc_generate, _int(params, "N"), _int(params, "mu"))
        samples = np.asarray(seq)
        meta = {"kind": "zc", "N": seq.N, "mu": seq.mu}
    rows = [(n, v.real, v.imag) for n, v in enumerate(samples)]
    meta["samples"] = [[r[1], r[2]] for r in rows]
    emit(args, csv_text(["n", "re", "im"], rows), json_text(meta))


def cmd_autocorr(args, params):
    _require(params, "N", "mu", "W", "delta_lambda")
    N, mu, W = _int(params, "N"), _int(params, "mu"), _int(params, "W")
    seq = _check(zc_generate, N, mu)
    dls = parse_values(params["delta_lambda"])
    rows = []
    for dk in range(-(W - 1), W):
        for dl in dls:
            closed = float(autocorr_mag_sq_closed(mu, N, dk, dl))
            brute = abs(autocorr_offset(seq, dk, dl)) ** 2
            rows.append((dk, dl, closed, brute))
    summary = {
        "N": N, "mu": mu, "W": W, "points": len(rows),
        "max_abs_difference": max(abs(r[2] - r[3]) for r in rows),
    }
    emit(args, csv_text(["delta_kappa", "delta_lambda", "mag_sq_closed", "mag_sq_brute"], rows),
         json_text(summary))


def cmd_spectrum(args, params):
    _require(params, "N", "mu", "W")
    N, mu, W = _int(params, "N"), _int(params, "mu"), _int(params, "W")
    _check(zc_generate, N, mu)
    ts = _check(timing_spectrum, mu, N, W)
    summary = {
        "N": N, "mu": mu, "W": W,
        "min_critical_offset": ts.min_abs_offset,
        "floor_above_half": error_floor(ts, ABOVE_HALF),
        "floor_at_half": error_floor(ts, AT_HALF),
        "total_mass": float(ts.total_mass),
    }
    if params.get("table"):
        rows = sorted(critical_table(mu, N, W - 1), key=lambda r: (abs(r[0]), -r[0]))
        emit(args, csv_text(["delta_kappa", "critical_offset"], rows), json_text(summary))
        return
    rows = [(k, ts[k]) for k in ts.keys()]
    emit(args, csv_text(["delta_lambda_dagger", "magnitude"], rows), json_text(summary))


def cmd_analyze(args, params):
    _require(params, "N", "mu", "W", "delta_lambda", "eta_db")
    dls, snrs = _sweep(params)
    if len(dls) == 1 and len(snrs) == 1:
        s = _scenario(params, dls[0], snrs[0])
        td = timing_distribution(s)
        rows = [(d, td.probabilities[d]) for d in td.offsets()]
        emit(args, csv_text(["delta_kappa", "probability"], rows),
             json_text({"error_probability": td.error_probability, "scenario": s.to_dict()}))
        return
    rows, records = [], []
    for dl in dls:
        for snr in snrs:
            s = _scenario(params, dl, snr)
            pe = timing_distribution(s).error_probability
            rows.append((dl, snr, pe))
            records.append({"error_probability": pe, "scenario": s.to_dict()})
    emit(args, csv_text(["delta_lambda", "snr_db", "error_probability"], rows), json_text(records))


def _sim_config(params, s):
    trials = _int(params, "trials") if params.get("trials") is not None else 10_000
    seed = _int(params, "seed") if params.get("seed") is not None else 0
    n_cp = _int(params, "N_CP") if params.get("N_CP") is not None else None
    kappa_mode = params.get("kappa_mode", "uniform")
    return _check(SimulationConfig, s, trials=trials, seed=seed, n_cp=n_cp, kappa_mode=kappa_mode,
                  random_phase=bool(params.get("random_phase", False)),
                  sequence=params.get("sequence", "zc"))


def _config_dict(cfg):
    return {
        "scenario": cfg.scenario.to_dict(), "N_CP": cfg.n_cp, "trials": cfg.trials,
        "seed": cfg.seed, "kappa_mode": cfg.kappa_mode, "random_phase": cfg.random_phase,
        "sequence": cfg.sequence,
    }


def cmd_simulate(args, params):
    _require(params, "N", "mu", "W", "delta_lambda", "eta_db")
    dls, snrs = _sweep(params)
    if len(dls) == 1 and len(snrs) == 1:
        cfg = _sim_config(params, _scenario(params, dls[0], snrs[0]))
        emp = run_experiment(cfg)
        rows = [(d, c, c / emp.trials) for d, c in emp.counts.items()]
        emit(args, csv_text(["delta_kappa", "count", "frequency"], rows),
             json_text({"error_rate": emp.error_rate, "stderr": emp.stderr,
                        "config": _config_dict(cfg)}))
        return
    rows, records = [], []
    for dl in dls:
        for snr in snrs:
            cfg = _sim_config(params, _scenario(params, dl, snr))
            emp = run_experiment(cfg)
            rows.append((dl, snr, emp.error_rate, emp.stderr))
            records.append({"error_rate": emp.error_rate, "stderr": emp.stderr,
                            "config": _config_dict(cfg)})
    emit(args, csv_text(["delta_lambda", "snr_db", "error_rate", "stderr"], rows),
         json_text(records))


def cmd_select(args, params):
    _require(params, "N", "W")
    N, W = _int(params, "N"), _int(params, "W")
    cands = params.get("candidates", "all")
    if isinstance(cands, str):
        if cands.strip().lower() == "all":
            cands = None
        else:
            try:
                cands = [int(c) for c in cands.split(",") if c.strip()]
            except ValueError:
                raise UsageError(f"candidates must be 'all' or a comma list of roots, got {cands!r}") from None
    fb = float(params.get("freq_bound", DEFAULT_FREQ_BOUND))
    reports = _check(rank_roots, N, W, cands, fb)
    rows = [(r.mu, r.min_abs_critical_offset, r.floor_above_half) for r in reports]
    emit(args, csv_text(["mu", "min_critical_offset", "floor"], rows),
         json_text({"N": N, "W": W, "freq_bound": fb, "ranking": [r.as_row() for r in reports]}))


COMMANDS = {
    "generate": cmd_generate,
    "autocorr": cmd_autocorr,
    "spectrum": cmd_spectrum,
    "analyze": cmd_analyze,
    "simulate": cmd_simulate,
    "select": cmd_select,
}


# --------------------------------------------------------------------------- parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common(p):
    p.add_argument("-N", "--length", dest="N", type=int, help="sequence length")
    p.add_argument("--mu", type=int, help="ZC root")
    p.add_argument("-W", "--window", dest="W", type=int, help="hypothesis window size")
    p.add_argument("--delta-lambda", help="normalized frequency offset(s): x, a,b,c or start:stop:step")
    p.add_argument("--snr-db", help="receive sample SNR(s) in dB, same syntax")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--config", help="JSON parameter file")
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--format", choices=("csv", "json", "both"), default="csv")
    p.add_argument("--repro", help=f"load a stored preset ({', '.join(PRESETS)})")


def build_parser():
    parser = _Parser(prog="zctiming", description="ZC timing detection under frequency offset")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("generate", help="write a ZC or PN sequence as CSV")
    _common(p)
    kind = p.add_mutually_exclusive_group()
    kind.add_argument("--zc", dest="kind", action="store_const", const="zc")
    kind.add_argument("--pn", dest="kind", action="store_const", const="pn")
    p.add_argument("--degree", type=int)
    p.add_argument("--taps", help="comma-separated LFSR taps")

    p = sub.add_parser("autocorr", help="closed-form vs brute-force autocorrelation grid")
    _common(p)

    p = sub.add_parser("spectrum", help="timing spectrum and error floors")
    _common(p)
    p.add_argument("--table", action="store_const", const=True,
                   help="emit the critical offset of every lag instead")

    p = sub.add_parser("analyze", help="analytic timing distribution / error probability")
    _common(p)

    p = sub.add_parser("simulate", help="Monte Carlo timing distribution / error rate")
    _common(p)
    p.add_argument("--n-cp", dest="N_CP", type=int)
    p.add_argument("--kappa-mode", help="'uniform' or a fixed arrival time")
    p.add_argument("--sequence", choices=("zc", "pn"))
    p.add_argument("--random-phase", action="store_const", const=True)

    p = sub.add_parser("select", help="rank ZC roots by timing spectrum")
    _common(p)
    p.add_argument("--freq-bound", type=float)
    p.add_argument("--candidates", help="'all' or comma-separated roots")
    return parser


def _expand_repro(argv):
    """``zctiming --repro NAME ...`` runs the preset's own subcommand."""
    if argv and (argv[0] == "--repro" or argv[0].startswith("--repro=")):
        if "=" in argv[0]:
            name, rest = argv[0].split("=", 1)[1], argv[1:]
        elif len(argv) > 1:
            name, rest = argv[1], argv[2:]
        else:
            raise UsageError("--repro needs a preset name")
        if name not in PRESETS:
            raise UsageError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
        return [PRESETS[name][0], "--repro", name, *rest]
    return argv


_LIST_FLAGS = ("--delta-lambda", "--snr-db")


def _bind_list_values(argv):
    """Attach values such as ``-1:1:0.01`` to their flag so argparse does not
    read them as options."""
    out = []
    it = iter(argv)
    for tok in it:
        if tok in _LIST_FLAGS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv = _bind_list_values(_expand_repro(argv))
        try:
            args = build_parser().parse_args(argv)
        except SystemExit as exc:
            return exc.code if isinstance(exc.code, int) else EXIT_USAGE
        params = resolve(args)
        COMMANDS[args.command](args, params)
    except UsageError as exc:
        print(f"zctiming: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (QuadratureError, ArithmeticError, FloatingPointError) as exc:
        print(f"zctiming: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return 0


if __name__ == "__main__":
    sys.exit(main())
