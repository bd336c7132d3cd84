"""Command-line front end.

Every subcommand writes one JSON report (to ``--out`` or standard output)
that embeds the package version and the resolved configuration.  Numbers are
written with 12 significant digits; infinities are written as the string
``"inf"``.  Exit status is 0 on success, 2 for invalid input and 3 when the
computation itself is undefined.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import EvidenceError, NumericalError, ValidationError
from .evidence import classify, evidence_report, jeffreys_label, prosecutor
from .gaussian import (
    NormalConjugateSpec,
    SufficientStat,
    bf_normal,
    diffuse_scan,
    info_inconsistency_limit,
    rb_normal,
)
from .mixture import bf_mixture, make_mixture, rb_mixture
from .model import load_model
from .robustness import GeometricContamination, LinearContamination, check_derivative, eps_scan

DIGITS = 12


def _round(value):
    if isinstance(value, dict):
        return {k: _round(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_round(v) for v in value]
    if isinstance(value, (bool, str)) or value is None:
        return value
    if isinstance(value, (int, np.integer)):
        return int(value)
    v = float(value)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return float(f"{v:.{DIGITS}g}")


def _number(v: float) -> str:
    r = _round(v)
    return r if isinstance(r, str) else repr(r)


def parse_range(text: str) -> list[float]:
    """Parse ``start:step:stop`` into an inclusive grid."""
    try:
        start, step, stop = (float(t) for t in text.split(":"))
    except ValueError:
        raise ValidationError(f"range {text!r} is not of the form start:step:stop") from None
    if not step > 0 or stop < start:
        raise ValidationError(f"range {text!r} needs step > 0 and stop >= start")
    count = int(math.floor((stop - start) / step + 1e-9))
    return [round(start + i * step, 12) for i in range(count + 1)]


def _read_json(path: str, what: str):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ValidationError(f"cannot read {what} file {path!r}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{what} file {path!r} is not valid JSON: {exc}") from None


def _key_values(tokens: list[str], allowed: set[str]) -> dict[str, str]:
    out = {}
    for tok in tokens:
        key, sep, val = tok.partition("=")
        if not sep or key not in allowed:
            raise ValidationError(f"expected one of {sorted(allowed)} as key=value, got {tok!r}")
        out[key] = val
    return out


def _hypothesis(text: str | None) -> str | None:
    if text is None:
        return None
    key, sep, val = text.partition("=")
    if sep:
        if key != "psi":
            raise ValidationError(f"hypothesis must be written psi=LABEL, got {text!r}")
        return val
    return text


def _write_csv(path: str, header: list[str], rows: list[list]) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_number(v) for v in row])
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


# -- subcommands --------------------------------------------------------------


def cmd_analyze(args) -> dict:
    model, marg = load_model(args.model)
    psi0 = _hypothesis(args.hypothesis)
    report = evidence_report(model, marg, args.observed, psi0=psi0, gamma=args.gamma, eta=args.eta).to_dict()
    if args.mixture:
        opts = _key_values(args.mixture, {"p", "psi0", "spike"})
        if "p" not in opts or "psi0" not in opts:
            raise ValidationError("--mixture needs p=<value> and psi0=<label>")
        try:
            p = float(opts["p"])
        except ValueError:
            raise ValidationError(f"mixture weight {opts['p']!r} is not a number") from None
        spike = _read_json(opts["spike"], "spike") if "spike" in opts else None
        mix = make_mixture(model, marg, opts["psi0"], p, spike)
        report["bf_mixture"] = float(bf_mixture(model, mix, args.observed))
        report["rb_mixture"] = float(rb_mixture(model, mix, args.observed))
        report["spike_matches_conditional"] = mix.spike_matches_conditional
    return report


def cmd_robustness(args) -> dict:
    model, _ = load_model(args.model)
    q = _read_json(args.q, "direction")
    family = LinearContamination if args.family == "lin" else GeometricContamination
    spec = family.on(model, q)
    model.theta_index(args.theta0)
    check = check_derivative(model, spec, args.target, args.theta0, args.observed)
    summary = {
        "closed_form": check.closed_form,
        "finite_difference": check.finite_difference,
        "gap": check.gap,
        "scheme": check.scheme,
    }
    if check.flipped_form is not None:
        summary["flipped_form"] = check.flipped_form
    if args.eps:
        rows = eps_scan(model, spec, args.target, args.theta0, args.observed, parse_range(args.eps))
        table = [[r.eps, r.value, r.log_value] for r in rows]
        if args.csv:
            _write_csv(args.csv, ["eps", "value", "log_value"], table)
        else:
            summary["scan"] = [dict(zip(("eps", "value", "log_value"), row)) for row in table]
    return summary


def cmd_gaussian(args) -> dict:
    spec = NormalConjugateSpec(args.mu0, args.tau2, args.alpha0, args.beta0, args.n, args.p)
    if args.variance:
        stat = SufficientStat.from_variance(args.xbar, args.s2, args.n)
    else:
        stat = SufficientStat(args.xbar, args.s2)
    bf, rb = bf_normal(spec, stat), rb_normal(spec, stat)
    out = {
        "bf": float(bf),
        "rb": float(rb),
        "limit": info_inconsistency_limit(spec),
        "classification": {"bf": classify(bf).value, "rb": classify(rb).value},
        "jeffreys": jeffreys_label(bf),
    }
    if args.scan_tau2:
        rows = diffuse_scan(spec, stat, parse_range(args.scan_tau2))
        table = [[r.tau2, r.bf, r.rb] for r in rows]
        if args.csv:
            _write_csv(args.csv, ["tau2", "bf", "rb"], table)
        else:
            out["scan"] = [dict(zip(("tau2", "bf", "rb"), row)) for row in table]
    return out


def cmd_prosecutor(args) -> dict:
    res = prosecutor(args.N, args.m)
    return {"rb": res.rb, "bf": res.bf, "posterior_guilt": res.posterior_guilt}


# -- plumbing ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="report path (default: standard output)")
    common.add_argument("--seed", type=int, default=0, help="seed recorded for randomized runs")

    parser = argparse.ArgumentParser(prog="relbelief", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="evidence report for a finite model")
    p.add_argument("--model", required=True)
    p.add_argument("--observed", required=True)
    p.add_argument("--hypothesis", help="psi=LABEL")
    p.add_argument("--gamma", type=float)
    p.add_argument("--eta", type=float, default=0.0)
    p.add_argument("--mixture", nargs="+", metavar="KEY=VALUE", help="p=.. psi0=.. [spike=file]")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("robustness", parents=[common], help="sensitivity to prior contamination")
    p.add_argument("--model", required=True)
    p.add_argument("--observed", required=True)
    p.add_argument("--family", choices=("lin", "geo"), required=True)
    p.add_argument("--q", required=True, help="JSON file with the direction q")
    p.add_argument("--target", choices=("rb", "bf"), default="rb")
    p.add_argument("--theta0", required=True)
    p.add_argument("--eps", help="start:step:stop")
    p.add_argument("--csv", help="write the eps scan here instead of into the report")
    p.set_defaults(func=cmd_robustness)

    p = sub.add_parser("gaussian", parents=[common], help="normal mean under a conjugate prior")
    for name in ("--mu0", "--tau2", "--alpha0", "--beta0", "--xbar", "--s2"):
        p.add_argument(name, type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float, default=0.5)
    kind = p.add_mutually_exclusive_group()
    kind.add_argument("--sumsq", action="store_true", help="--s2 is the centered sum of squares (default)")
    kind.add_argument("--variance", action="store_true", help="--s2 is the sample variance")
    p.add_argument("--scan-tau2", help="start:step:stop")
    p.add_argument("--csv", help="write the tau2 scan here instead of into the report")
    p.set_defaults(func=cmd_gaussian)

    p = sub.add_parser("prosecutor", parents=[common], help="trait-match evidence of guilt")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.set_defaults(func=cmd_prosecutor)
    return parser


def _config(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k != "func"}


def run(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        result = args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3
    except EvidenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    report = {"version": __version__, "config": _config(args), "result": result}
    text = json.dumps(_round(report), indent=2, ensure_ascii=False) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
