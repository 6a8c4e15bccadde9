"""Command-line entry point: ``ellsurj <subcommand> [options]``.

Settings come from built-in defaults, then an optional ``--config`` file of
``key = value`` lines (``#`` starts a comment, repeated ``curve`` keys
accumulate), then command-line flags; later sources win.  Every artifact
embeds the resolved configuration.

Exit codes: 0 success (Inconclusive certificates included), 1 computational
failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__
from .arith import is_prime, primes_between
from .bounds import C_prime, C_tilde, Surd, bound_report, genus_X0, x0_invariants
from .curves import Q, count_points, function_field_samples, parse_curve, trace_samples
from .errors import EllSurjError
from .families import FamilySpec, chebotarev_count, scan_exceptional
from .groups import count_by_trace_det, class_size_closed_form, mw_harness
from .surjectivity import certify_product, certify_single, validate_witness_soundness

log = logging.getLogger("ellsurj")

SUBCOMMANDS = ("constants", "genus-x0", "count", "certify", "chebotarev", "scan", "verify-group")

DEFAULTS = {
    "g": "0..10",
    "n": "2",
    "levels": "1..100",
    "curve": [],
    "family": None,
    "p": None,
    "p_max": None,
    "method": "auto",
    "ell": None,
    "ell_range": None,
    "char": None,
    "T": "10",
    "threads": "1",
    "output": None,
    "format": None,
    "full_closure": "false",
}


class ConfigError(Exception):
    def __init__(self, field_name: str, message: str):
        super().__init__(f"config error in '{field_name}': {message}")
        self.field = field_name


@dataclass
class RunConfig:
    subcommand: str
    curves: list[str] = field(default_factory=list)
    family_file: str | None = None
    g_range: tuple[int, int] | None = None
    n: int = 2
    levels: tuple[int, int] | None = None
    T: int | None = None
    ell: int | None = None
    ell_range: list[int] | None = None
    p: int | None = None
    p_max: int | None = None
    char: int | None = None
    method: str = "auto"
    output: str | None = None
    format: str = "json"
    threads: int = 1
    full_closure: bool = False
    version: str = __version__

    def artifact_config(self) -> dict:
        """Config as embedded in artifacts; the thread count is excluded so output is thread-independent."""
        d = asdict(self)
        d.pop("threads")
        d.pop("output")
        return d


def read_config_file(path: str) -> dict:
    out: dict = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("config", f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in DEFAULTS:
            raise ConfigError(key, f"unknown key in {path}:{lineno}")
        if key == "curve":
            out.setdefault("curve", []).append(value)
        else:
            out[key] = value
    return out


def _range(field_name: str, text: str, lo_min: int = 0) -> tuple[int, int]:
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            lo, hi = int(a), int(b)
        else:
            lo = hi = int(text)
    except ValueError:
        raise ConfigError(field_name, f"expected N or N..M, got {text!r}") from None
    if lo < lo_min or hi < lo:
        raise ConfigError(field_name, f"invalid range {text!r}")
    return lo, hi


def _pos_int(field_name: str, text, minimum: int = 1) -> int:
    try:
        v = int(text)
    except (TypeError, ValueError):
        raise ConfigError(field_name, f"expected an integer, got {text!r}") from None
    if v < minimum:
        raise ConfigError(field_name, f"must be >= {minimum}, got {v}")
    return v


def _prime(field_name: str, text) -> int:
    v = _pos_int(field_name, text, 2)
    if not is_prime(v):
        raise ConfigError(field_name, f"{v} is not prime")
    return v


def resolve(args: argparse.Namespace) -> RunConfig:
    merged = dict(DEFAULTS)
    if args.config:
        merged.update(read_config_file(args.config))
    for key in DEFAULTS:
        v = getattr(args, key, None)
        if v is not None and v != []:
            merged[key] = v
    cmd = args.subcommand
    cfg = RunConfig(subcommand=cmd)
    cfg.curves = list(merged["curve"])
    cfg.family_file = merged["family"]
    if cfg.family_file:
        try:
            lines = Path(cfg.family_file).read_text().splitlines()
        except OSError as exc:
            raise ConfigError("family", f"cannot read {cfg.family_file}: {exc}") from exc
        cfg.curves += [s.split("#", 1)[0].strip() for s in lines if s.split("#", 1)[0].strip()]
    cfg.threads = _pos_int("threads", merged["threads"])
    cfg.output = merged["output"]
    fmt = merged["format"] or ("csv" if cmd in ("constants", "genus-x0", "count", "chebotarev") else "json")
    if fmt not in ("json", "csv"):
        raise ConfigError("format", f"expected json or csv, got {fmt!r}")
    cfg.format = fmt
    cfg.method = merged["method"]
    if cfg.method not in ("auto", "exhaustive", "bsgs"):
        raise ConfigError("method", f"unknown method {cfg.method!r}")
    cfg.full_closure = str(merged["full_closure"]).lower() in ("1", "true", "yes")

    if cmd == "constants":
        cfg.g_range = _range("g", merged["g"])
        cfg.n = _pos_int("n", merged["n"])
    elif cmd == "genus-x0":
        cfg.levels = _range("levels", merged["levels"], 1)
    elif cmd == "count":
        if not cfg.curves:
            raise ConfigError("curve", "at least one curve is required")
        if merged["p"] is not None:
            cfg.p = _prime("p", merged["p"])
            if cfg.p <= 3:
                raise ConfigError("p", "characteristic 2 and 3 are unsupported")
        elif merged["p_max"] is not None:
            cfg.p_max = _pos_int("p_max", merged["p_max"], 5)
        else:
            raise ConfigError("p", "give --p or --p-max")
    elif cmd == "certify":
        if not cfg.curves:
            raise ConfigError("curve", "at least one curve is required")
        _levels(cfg, merged)
        if merged["char"] is not None:
            cfg.char = _prime("char", merged["char"])
            if cfg.char <= 3:
                raise ConfigError("char", "characteristic 2 and 3 are unsupported")
            if cfg.char in (cfg.ell_range or []):
                raise ConfigError("ell", f"ell must differ from the characteristic {cfg.char}")
        else:
            cfg.p_max = _pos_int("p_max", merged["p_max"] or 1000, 5)
    elif cmd == "chebotarev":
        _family_curves(cfg)
        cfg.p = _prime("p", merged["p"])
        cfg.ell = _prime("ell", merged["ell"])
        if cfg.ell == cfg.p:
            raise ConfigError("ell", f"ell={cfg.ell} must differ from p={cfg.p}")
        if cfg.p <= 3:
            raise ConfigError("p", "characteristic 2 and 3 are unsupported")
    elif cmd == "scan":
        _family_curves(cfg)
        cfg.T = _pos_int("T", merged["T"])
        cfg.p_max = _pos_int("p_max", merged["p_max"] or 1000, 30)
        if merged["ell_range"] is None and merged["ell"] is None:
            merged["ell_range"] = "7..100"
        _levels(cfg, merged)
        if any(ell <= 5 for ell in cfg.ell_range):
            raise ConfigError("ell_range", "scan levels must be primes > 5")
    elif cmd == "verify-group":
        cfg.ell = _prime("ell", merged["ell"] or 5)
        if cfg.ell < 5:
            raise ConfigError("ell", "the lemma harness needs ell >= 5")
    return cfg


def _levels(cfg: RunConfig, merged: dict) -> None:
    if merged["ell"] is not None:
        cfg.ell = _prime("ell", merged["ell"])
        cfg.ell_range = [cfg.ell]
    elif merged["ell_range"] is not None:
        lo, hi = _range("ell_range", merged["ell_range"], 2)
        cfg.ell_range = primes_between(lo, hi)
        if not cfg.ell_range:
            raise ConfigError("ell_range", f"no primes in {lo}..{hi}")
    else:
        raise ConfigError("ell", "give --ell or --ell-range")


def _family_curves(cfg: RunConfig) -> None:
    if len(cfg.curves) < 2:
        raise ConfigError("curve", "a family needs at least two curves (--curve or --family)")


# --- subcommand bodies -------------------------------------------------------------

def _cell(v, fmt: str):
    if isinstance(v, Surd):
        return v.to_json() if fmt == "json" else str(v)
    return v


def run_constants(cfg: RunConfig):
    rows = []
    for g in range(cfg.g_range[0], cfg.g_range[1] + 1):
        r = bound_report(g, cfg.n).row()
        r["C_tilde_n1"] = C_tilde(g, 1)
        r["C_prime_zero_heights"] = C_prime(g, [0, 0])
        rows.append({k: _cell(v, cfg.format) for k, v in r.items()})
    return rows


def run_genus(cfg: RunConfig):
    return [
        {"N": N, **x0_invariants(N), "genus": genus_X0(N)}
        for N in range(cfg.levels[0], cfg.levels[1] + 1)
    ]


def run_count(cfg: RunConfig):
    rows = []
    primes = [cfg.p] if cfg.p else [q for q in primes_between(5, cfg.p_max)]
    for spec in cfg.curves:
        base = parse_curve(spec)
        if base.base != Q:
            raise ConfigError("curve", f"{spec!r}: count expects a constant curve '[a4];[a6]'")
        for p in primes:
            try:
                c = base.reduce_mod(p)
            except EllSurjError:
                rows.append({"curve": spec, "p": p, "a": None, "N": None, "status": "bad"})
                continue
            fd = count_points(c, cfg.method)
            rows.append({"curve": spec, "p": p, "a": fd.a, "N": fd.N, "status": "good"})
    return rows


def run_certify(cfg: RunConfig):
    out = []
    if cfg.char:
        curves = [parse_curve(s, cfg.char) for s in cfg.curves]
        if any(not c.base.function_field for c in curves):
            raise ConfigError("curve", "function-field mode needs curves with t-dependent coefficients")
    else:
        curves = [parse_curve(s) for s in cfg.curves]
        if any(c.base != Q for c in curves):
            raise ConfigError("curve", "curves over Q must be constant '[a4];[a6]' (or give --char)")
    for ell in cfg.ell_range:
        if cfg.char:
            samples = function_field_samples(curves, ell)
        else:
            samples = trace_samples(curves, cfg.p_max, ell)
        if ell <= 5:
            if len(curves) != 1:
                out.append({"ell": ell, "status": "Inconclusive", "notes": ["products need ell > 5"]})
                continue
            s = certify_single(samples, ell)
            out.append({"ell": ell, "n": 1, "status": s.status, "small_ell_mode": s.small_ell_mode,
                        "singles": [{"factor": 0, "status": s.status, "witnesses": s.witnesses}],
                        "pairs": [], "geometric": bool(cfg.char), "notes": []})
            continue
        cert = certify_product(samples, ell, n=len(curves), geometric=bool(cfg.char))
        d = cert.to_dict()
        d["sample_count"] = len(samples)
        out.append(d)
    return out


def run_chebotarev(cfg: RunConfig):
    fam = FamilySpec.parse(cfg.curves)
    return chebotarev_count(fam, cfg.p, cfg.ell)


def run_scan(cfg: RunConfig):
    fam = FamilySpec.parse(cfg.curves)
    return scan_exceptional(fam, cfg.T, cfg.ell_range, cfg.p_max, threads=cfg.threads)


def run_verify_group(cfg: RunConfig):
    ell = cfg.ell
    counts = [
        {"tau": tau, "det": d, "count": count_by_trace_det(ell, tau, d), "closed_form": class_size_closed_form(ell, tau, d)}
        for d in range(1, ell)
        for tau in range(ell)
    ]
    harness = mw_harness(ell, include_full=cfg.full_closure or ell == 5)
    sound = validate_witness_soundness(ell)
    return {
        "counts": counts,
        "harness": [{"instance": h.name, "order": h.order, "passed": h.passed, "detail": h.detail} for h in harness],
        "soundness": {"missing": sound.missing, "low_order_ok": sound.low_order_ok, "passed": sound.ok},
    }


# --- output ----------------------------------------------------------------------------

def _csv(rows: list[dict], config: dict) -> str:
    buf = io.StringIO()
    buf.write("# config: " + json.dumps(config, sort_keys=True) + "\n")
    if rows:
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow(r)
    return buf.getvalue()


def render(cfg: RunConfig, result) -> str:
    config = cfg.artifact_config()
    cmd = cfg.subcommand
    if cmd == "scan":
        if cfg.format == "csv":
            return "# config: " + json.dumps(result.config, sort_keys=True) + "\n" + result.to_csv()
        return result.to_json()
    if cmd == "chebotarev":
        if cfg.format == "csv":
            return "# config: " + json.dumps(config, sort_keys=True) + "\n" + result.to_csv()
        payload = {
            "p": result.p,
            "ell": result.ell,
            "n": result.n,
            "good_count": result.good_count,
            "prediction": result.prediction(),
            "max_deviation": result.max_deviation(),
            "counts": [{"tau": list(k), "count": v} for k, v in sorted(result.counts.items())],
        }
    elif cmd == "verify-group":
        if cfg.format == "csv":
            lines = _csv(result["counts"], config)
            lines += "".join(
                f"# harness {h['instance']}: {'PASS' if h['passed'] else 'FAIL'} (order {h['order']}; {h['detail']})\n"
                for h in result["harness"]
            )
            lines += f"# witness-class soundness: {'PASS' if result['soundness']['passed'] else 'FAIL'}\n"
            return lines
        payload = result
    elif cmd == "certify":
        if cfg.format == "csv":
            rows = [{"ell": c["ell"], "status": c["status"], "notes": " | ".join(c.get("notes", []))} for c in result]
            return _csv(rows, config)
        payload = {"certificates": result}
    else:
        if cfg.format == "csv":
            return _csv(result, config)
        payload = {"rows": result}
    return json.dumps({"schema": 1, "config": config, **payload}, indent=2, sort_keys=True) + "\n"


RUNNERS = {
    "constants": run_constants,
    "genus-x0": run_genus,
    "count": run_count,
    "certify": run_certify,
    "chebotarev": run_chebotarev,
    "scan": run_scan,
    "verify-group": run_verify_group,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value configuration file")
    common.add_argument("--output", "-o", help="write the artifact here instead of stdout")
    common.add_argument("--format", choices=["json", "csv"])
    common.add_argument("--threads", help="worker threads (results do not depend on it)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="ellsurj", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("constants", parents=[common], help="c(g), C(g), C~, C' and isogeny bounds")
    p.add_argument("--g", help="genus or range N..M (default 0..10)")
    p.add_argument("--n", help="number of factors for C~ (default 2)")

    p = sub.add_parser("genus-x0", parents=[common], help="genus of X_0(N)")
    p.add_argument("levels", nargs="?", help="N or N..M")

    def curves(sp, family=True):
        sp.add_argument("--curve", action="append", default=[], help="'[A-coeffs];[B-coeffs]', repeatable")
        if family:
            sp.add_argument("--family", help="file with one curve per line")

    p = sub.add_parser("count", parents=[common], help="point counts and Frobenius traces")
    curves(p, family=False)
    p.add_argument("--p", help="a single prime")
    p.add_argument("--p-max", dest="p_max", help="all primes 5 <= p <= P")
    p.add_argument("--method", choices=["auto", "exhaustive", "bsgs"])

    p = sub.add_parser("certify", parents=[common], help="surjectivity certificates")
    curves(p)
    p.add_argument("--ell")
    p.add_argument("--ell-range", dest="ell_range")
    p.add_argument("--p-max", dest="p_max", help="sample primes up to P (curves over Q)")
    p.add_argument("--char", help="work over F_p(t) for this p, sampling all t0 in F_p")

    p = sub.add_parser("chebotarev", parents=[common], help="exact trace-count table T_p")
    curves(p)
    p.add_argument("--p")
    p.add_argument("--ell")

    p = sub.add_parser("scan", parents=[common], help="exceptional-prime density scan")
    curves(p)
    p.add_argument("--T")
    p.add_argument("--ell-range", dest="ell_range")
    p.add_argument("--ell")
    p.add_argument("--p-max", dest="p_max")

    p = sub.add_parser("verify-group", parents=[common], help="class counts and lemma harness at ell")
    p.add_argument("--ell")
    p.add_argument("--full-closure", dest="full_closure", action="store_const", const="true")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve(args)
    except ConfigError as exc:
        print(f"ellsurj: {exc}", file=sys.stderr)
        return 2
    try:
        text = render(cfg, RUNNERS[cfg.subcommand](cfg))
    except ConfigError as exc:
        print(f"ellsurj: {exc}", file=sys.stderr)
        return 2
    except EllSurjError as exc:
        print(f"ellsurj: computation failed: {exc}", file=sys.stderr)
        return 1
    if cfg.output:
        Path(cfg.output).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
