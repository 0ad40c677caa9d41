"""Command-line front end: presets, sweeps and CSV output.

Example::

    python -m fdrelay --preset fig4 --schemes sc-af,nc-sdf,direct \\
        --method both --trials 1000000 --seed 7 --out fig4.csv

Exit codes: 0 success, 2 usage/configuration error, 3 numerical failure.
Errors are reported as a single JSON line on stderr.
"""

import argparse
import contextlib
import csv
import datetime
import json
import sys

from . import __version__
from .analytic import outage
from .errors import ConfigError, DomainError, NumericError
from .montecarlo import SWEEP_AXES, McConfig, apply_axis, derive_seed, estimate_outage
from .presets import PRESETS, SCHEME_LABELS, base_config, frange, get_preset, resolve_scheme
from .channel import ChannelParams, db_to_linear

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3

HEADER = ["sweep_value", "scheme", "method", "outage", "std_err", "trials"]

# Model parameters settable from a config file or --set (dB where noted).
PARAM_KEYS = {
    "sigma2_SD_dB", "sigma2_SR_dB", "sigma2_RD_dB", "sigma2_RR_dB",
    "R", "m", "P_S_dB", "P_R_dB", "N", "tau_af", "tau_sdf",
}
# Run options a config file may also carry; the same names as the long flags.
OPTION_KEYS = {"preset", "schemes", "method", "sweep", "trials", "seed", "out",
               "mi_mode", "workers", "batch_size", "no_meta"}

# Without a preset the model starts from these values (fig2's link budget).
DEFAULT_PARAMS = {"sigma2_SD_dB": 0.0, "sigma2_SR_dB": 20.0, "sigma2_RD_dB": 20.0,
                  "sigma2_RR_dB": 0.0, "R": 2.0}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser():
    p = _Parser(prog="fdrelay", description="Outage probability of full-duplex relaying schemes.")
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--scheme", "--schemes", dest="schemes",
                   help="comma-separated list of: " + ", ".join(SCHEME_LABELS))
    p.add_argument("--method", choices=["analytic", "mc", "both"])
    p.add_argument("--sweep", metavar="VAR=START:STEP:STOP",
                   help="sweep axis, one of " + ", ".join(SWEEP_AXES))
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--batch-size", dest="batch_size", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--mi-mode", dest="mi_mode", choices=["approx", "exact"])
    p.add_argument("--out", help="output CSV path (default: stdout)")
    p.add_argument("--config", help="key = value file; flags take precedence")
    p.add_argument("--set", dest="params", action="append", default=[], metavar="KEY=VALUE",
                   help="model parameter override, one of " + ", ".join(sorted(PARAM_KEYS)))
    p.add_argument("--no-meta", dest="no_meta", action="store_true", default=None,
                   help="omit the leading comment line (makes output byte-stable)")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return p


def read_config(path):
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc.strerror}") from None
    for no, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip().replace("-", "_"), value.strip()
        key = "schemes" if key == "scheme" else key
        if not sep or not key:
            raise ConfigError(f"{path}:{no}: expected 'key = value'")
        if key not in PARAM_KEYS | OPTION_KEYS:
            raise ConfigError(f"{path}:{no}: unknown key {key!r}")
        out[key] = value
    return out


def parse_sweep(text):
    var, sep, rng = text.partition("=")
    parts = rng.split(":")
    if not sep or len(parts) != 3:
        raise ConfigError(f"--sweep expects VAR=START:STEP:STOP, got {text!r}")
    if var not in SWEEP_AXES:
        raise ConfigError(f"unknown sweep axis {var!r}; expected one of {SWEEP_AXES}")
    try:
        start, step, stop = (float(x) for x in parts)
    except ValueError:
        raise ConfigError(f"non-numeric sweep range {rng!r}") from None
    return var, frange(start, step, stop)


def _number(key, value):
    try:
        return float(value)
    except ValueError:
        raise ConfigError(f"{key} must be numeric, got {value!r}") from None


def _int(key, value):
    v = _number(key, value)
    if not v.is_integer():
        raise ConfigError(f"{key} must be an integer, got {value!r}")
    return int(v)


def resolve(args):
    """Merge config file, preset and flags into a run plan (a plain dict)."""
    opts = read_config(args.config) if args.config else {}
    for key in OPTION_KEYS:
        v = getattr(args, key, None)
        if v is not None:
            opts[key] = v
    params = {k: v for k, v in opts.items() if k in PARAM_KEYS}
    for item in args.params:
        key, sep, value = item.partition("=")
        if not sep or key.strip() not in PARAM_KEYS:
            raise ConfigError(f"--set expects KEY=VALUE with KEY in {sorted(PARAM_KEYS)}")
        params[key.strip()] = value.strip()

    preset = get_preset(opts["preset"]) if opts.get("preset") else None
    model = dict(DEFAULT_PARAMS)
    axis, grid, sd_offset = None, None, None
    if preset is not None:
        model.update({"sigma2_SD_dB": preset.sd_db, "sigma2_SR_dB": preset.sr_db,
                      "sigma2_RD_dB": preset.rd_db, "sigma2_RR_dB": preset.rr_db,
                      "R": preset.rate_r})
        axis, grid, sd_offset = preset.axis, list(preset.grid), preset.sd_offset_db
    model.update({k: _number(k, v) for k, v in params.items()})

    if opts.get("sweep"):
        new_axis, grid = parse_sweep(opts["sweep"])
        if new_axis != axis:
            sd_offset = None
        axis = new_axis
    if axis is None:
        axis, grid = "R", [model["R"]]

    schemes = opts.get("schemes") or ",".join(SCHEME_LABELS)
    schemes = [s.strip() for s in str(schemes).split(",") if s.strip()]
    for s in schemes:
        if s not in SCHEME_LABELS:
            raise ConfigError(f"unknown scheme {s!r}; expected one of {list(SCHEME_LABELS)}")

    method = opts.get("method", "analytic")
    if method not in ("analytic", "mc", "both"):
        raise ConfigError(f"method must be analytic, mc or both, got {method!r}")

    m = model.get("m", 2.0)
    ch = ChannelParams.from_db(model["sigma2_SD_dB"], model["sigma2_SR_dB"],
                               model["sigma2_RD_dB"], model["sigma2_RR_dB"], m=m)
    cfg_kw = {}
    # the super-block length L comes from the scheme label (sc-sdf / sc-sdf3)
    for key, field_name in (("N", "n_block"), ("tau_af", "tau_af"), ("tau_sdf", "tau_sdf")):
        if key in model:
            cfg_kw[field_name] = _int(key, model[key])
    for key, field_name in (("P_S_dB", "p_s"), ("P_R_dB", "p_r")):
        if key in model:
            cfg_kw[field_name] = db_to_linear(model[key])
    cfg = base_config(rate_r=model["R"], **cfg_kw)

    no_meta = opts.get("no_meta")
    if isinstance(no_meta, str):
        no_meta = no_meta.lower() in ("1", "true", "yes", "on")
    mc = McConfig(
        trials=_int("trials", opts.get("trials", 1_000_000)),
        seed=_int("seed", opts.get("seed", 0)),
        batch_size=_int("batch_size", opts.get("batch_size", 250_000)),
        mi_mode=opts.get("mi_mode", "approx"),
        workers=_int("workers", opts.get("workers", 1)),
    )
    return {
        "preset": preset.name if preset else None,
        "ch": ch, "cfg": cfg, "axis": axis, "grid": grid, "sd_offset_db": sd_offset,
        "schemes": schemes, "method": method, "mc": mc,
        "out": opts.get("out"), "no_meta": bool(no_meta),
    }


def _fmt(x):
    return repr(float(x))


def generate_rows(plan):
    """Yield CSV rows in grid-major, then scheme, then method order."""
    mc = plan["mc"]
    methods = ["analytic", "mc"] if plan["method"] == "both" else [plan["method"]]
    for i, value in enumerate(plan["grid"]):
        ch, cfg = apply_axis(plan["ch"], plan["cfg"], plan["axis"], value, plan["sd_offset_db"])
        mc_i = McConfig(mc.trials, derive_seed(mc.seed, i), mc.batch_size, mc.mi_mode, mc.workers)
        for label in plan["schemes"]:
            kind, cfg_s = resolve_scheme(label, cfg)
            for method in methods:
                if method == "analytic":
                    est = outage(kind, ch, cfg_s)
                    method_name = "analytic"
                else:
                    est = estimate_outage(kind, ch, cfg_s, mc_i)
                    method_name = "mc"
                yield [_fmt(value), label, method_name, _fmt(est.p), _fmt(est.std_err),
                       str(est.trials)]


def _meta_line(plan):
    mc = plan["mc"]
    stamp = datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
    return (f"# fdrelay {__version__} preset={plan['preset']} axis={plan['axis']} "
            f"method={plan['method']} trials={mc.trials} seed={mc.seed} "
            f"mi_mode={mc.mi_mode} generated={stamp}\n")


def _fail(code, kind, message, **extra):
    print(json.dumps({"error": kind, "message": message, **extra}), file=sys.stderr)
    return code


def run(argv=None):
    """Entry point returning the process exit code."""
    try:
        args = build_parser().parse_args(argv)
        plan = resolve(args)
    except UsageError as exc:
        return _fail(EXIT_USAGE, "usage", str(exc))
    except (ConfigError, DomainError) as exc:
        return _fail(EXIT_USAGE, "config", str(exc))

    rows = []
    try:
        for row in generate_rows(plan):
            rows.append(row)
    except NumericError as exc:
        return _fail(EXIT_NUMERIC, "numeric", str(exc), term=exc.term,
                     estimate=exc.estimate)
    except (ConfigError, DomainError) as exc:
        return _fail(EXIT_USAGE, "config", str(exc))

    with contextlib.ExitStack() as stack:
        if plan["out"]:
            try:
                fh = stack.enter_context(open(plan["out"], "w", newline="", encoding="utf-8"))
            except OSError as exc:
                return _fail(EXIT_USAGE, "config", f"cannot write {plan['out']!r}: {exc.strerror}")
        else:
            fh = sys.stdout
        if not plan["no_meta"]:
            fh.write(_meta_line(plan))
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(HEADER)
        writer.writerows(rows)
    return EXIT_OK


def main():
    sys.exit(run())
