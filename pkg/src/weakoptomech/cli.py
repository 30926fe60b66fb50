"""Command-line front end: figure tables, sweeps, oracle checks, feasibility."""
from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from .closed import mean_q_closed, mean_q_smalltime
from .damped import mean_p_damped, mean_q_damped
from .detection import arrival_density, dark_count_threshold, overall_P, postselect_prob
from .errors import ConfigParse, UnknownFigure, WeakOptomechError
from .figures import FIGURES, figure_table, format_csv
from .params import ModelParams
from .verify import closed_oracle, run_oracle_check

OUTPUTS = ("q_closed", "q_damped", "p_damped", "q_smalltime", "prob", "arrival_density", "P")
#: Header used when a sweep asks for ``q_closed`` alone.
MINIMAL_HEADER = ("omega_m_t", "q_over_sigma")

# finesse quoted for the 450 kHz, kappa = 10 omega_m device
REFERENCE_FINESSE = 3.33e2
REFERENCE_K_MIN = 0.0033


@dataclass
class SweepSpec:
    params: list[ModelParams]
    wt_grid: tuple[float, float, int]
    outputs: tuple[str, ...] = ("q_closed",)
    oracle: bool = False

    def grid(self):
        start, stop, count = self.wt_grid
        return np.linspace(start, stop, count)


def _list(value):
    return [v.strip() for v in value.split(",") if v.strip()]


def _floats(value, key, lineno):
    try:
        out = [float(eval_number(v)) for v in _list(value)]
    except ValueError as exc:
        raise ConfigParse(f"line {lineno}: field {key!r}: {exc}") from None
    if not out:
        raise ConfigParse(f"line {lineno}: field {key!r} is empty")
    return out


def eval_number(text: str) -> float:
    """Parse a float, allowing ``pi`` and simple ratios such as ``pi/3`` or ``1/2``."""
    t = text.strip().replace(" ", "")
    if "/" in t:
        num, _, den = t.partition("/")
        return eval_number(num) / eval_number(den)
    if t.endswith("pi"):
        head = t[:-2].rstrip("*")
        return (float(head) if head not in ("", "+", "-") else float(head + "1")) * math.pi
    try:
        return float(t)
    except ValueError:
        raise ValueError(f"not a number: {text!r}") from None


_KEYS = {"k", "alpha_abs", "theta", "gamma", "kappa_ratio", "wt_start", "wt_stop", "wt_count",
         "outputs", "oracle"}


def parse_config(text: str) -> SweepSpec:
    """Parse ``key = value`` lines into a :class:`SweepSpec`.

    Parameter keys take comma-separated lists; lists of length one broadcast.
    """
    raw, lines = {}, {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigParse(f"line {lineno}: expected 'key = value', got {line!r}")
        key, _, value = (s.strip() for s in line.partition("="))
        if key not in _KEYS:
            raise ConfigParse(f"line {lineno}: unknown field {key!r}")
        if key in raw:
            raise ConfigParse(f"line {lineno}: field {key!r} given twice")
        raw[key], lines[key] = value, lineno

    def get(key, default=None):
        if key not in raw:
            if default is None:
                raise ConfigParse(f"missing field {key!r}")
            return default
        return _floats(raw[key], key, lines[key])

    if "k" not in raw:
        raise ConfigParse("missing field 'k'")
    cols = {name: get(name, [d]) for name, d in
            (("k", None), ("alpha_abs", 0.0), ("theta", 0.0), ("gamma", 0.0), ("kappa_ratio", 10.0))}
    n = max(len(v) for v in cols.values())
    for name, vals in cols.items():
        if len(vals) not in (1, n):
            where = f"line {lines[name]}: " if name in lines else ""
            raise ConfigParse(f"{where}field {name!r} has {len(vals)} values, expected 1 or {n}")
    params = []
    for i in range(n):
        vals = {name: v[i if len(v) > 1 else 0] for name, v in cols.items()}
        try:
            params.append(ModelParams(**vals))
        except ValueError as exc:
            raise ConfigParse(f"parameter set {i}: {exc}") from None

    for key in ("wt_start", "wt_stop", "wt_count"):
        if key not in raw:
            raise ConfigParse(f"missing field {key!r} (the time grid is required)")
    start, stop = get("wt_start")[0], get("wt_stop")[0]
    count = get("wt_count")[0]
    if count != int(count) or count < 2:
        raise ConfigParse(f"line {lines['wt_count']}: field 'wt_count' must be an integer >= 2")
    if not start < stop:
        raise ConfigParse(f"line {lines['wt_stop']}: field 'wt_stop' must exceed 'wt_start'")
    if start < 0:
        raise ConfigParse(f"line {lines['wt_start']}: field 'wt_start' must be nonnegative")

    outputs = tuple(_list(raw.get("outputs", "q_closed")))
    if not outputs:
        raise ConfigParse(f"line {lines['outputs']}: field 'outputs' is empty")
    for name in outputs:
        if name not in OUTPUTS:
            raise ConfigParse(f"line {lines['outputs']}: unknown output {name!r}")
    if any(o in ("q_damped", "p_damped") for o in outputs) and "gamma" not in raw:
        raise ConfigParse(f"line {lines['outputs']}: damped outputs need a 'gamma' field")
    if "q_smalltime" in outputs and stop > 0.1:
        raise ConfigParse(f"line {lines['wt_stop']}: q_smalltime is valid only for wt <= 0.1")

    oracle = raw.get("oracle", "false").lower()
    if oracle not in ("true", "false"):
        raise ConfigParse(f"line {lines['oracle']}: field 'oracle' must be true or false")
    return SweepSpec(params, (start, stop, int(count)), outputs, oracle == "true")


def _column(name, p, x):
    if name == "q_closed":
        return mean_q_closed(p, x)
    if name == "q_damped":
        return mean_q_damped(p, x)
    if name == "p_damped":
        return mean_p_damped(p, x)
    if name == "q_smalltime":
        return mean_q_smalltime(p, x)
    if name == "prob":
        return postselect_prob(p, x)
    if name == "arrival_density":
        return arrival_density(p.kappa_ratio, x)
    return np.full_like(x, overall_P(p))


def sweep_table(spec: SweepSpec):
    """Rows ordered by parameter index then time."""
    x = spec.grid()
    minimal = spec.outputs == ("q_closed",) and len(spec.params) == 1
    if minimal:
        header = list(MINIMAL_HEADER)
    else:
        header = ["param_index", "k", "alpha_abs", "theta", "gamma", "kappa_ratio", "omega_m_t"]
        header += list(spec.outputs)
    if spec.oracle:
        header += ["q_oracle", "delta_q"]
    blocks = []
    for i, p in enumerate(spec.params):
        cols = [] if minimal else [np.full_like(x, v) for v in
                                   (i, p.k, p.alpha_abs, p.theta, p.gamma, p.kappa_ratio)]
        cols.append(x)
        cols += [np.broadcast_to(_column(name, p, x), x.shape) for name in spec.outputs]
        if spec.oracle:
            q_oracle = _oracle_q(p, x)
            cols += [q_oracle, mean_q_closed(p, x) - q_oracle]
        blocks.append(cols)
    columns = [np.concatenate([b[j] for b in blocks]) for j in range(len(header))]
    return header, columns


def _oracle_q(p, x):
    out = np.full(x.shape, np.nan)
    pos = x > 0
    if np.any(pos):
        out[pos] = closed_oracle(p, x[pos])[0]
    return out


def feasibility_report(f_m: float, kappa_ratio: float, dark_rate: float) -> str:
    k_min = dark_count_threshold(f_m, kappa_ratio, dark_rate)
    lines = [
        f"mechanical frequency f_m      = {f_m:.6g} Hz",
        f"cavity decay kappa/omega_m    = {kappa_ratio:.6g}",
        f"dark count rate               = {dark_rate:.6g} Hz",
        f"minimum coupling k_min        = {k_min:.6g}",
    ]
    if k_min > 0:
        P = overall_P(ModelParams(k=k_min, alpha_abs=0.5, kappa_ratio=kappa_ratio))
        lines.append(f"P at k_min (|alpha|=1/2, th=0) = {P:.6g}")
    else:
        lines.append("P at k_min (|alpha|=1/2, th=0) = 0")
    window = 1.0 / (kappa_ratio * 2 * math.pi * f_m)
    lines += [
        f"detection window 1/kappa      = {window:.6g} s (kappa = kappa_ratio * 2 pi f_m)",
        f"reference: k_min ~ {REFERENCE_K_MIN} at 450 kHz, kappa = 10 omega_m, 2 Hz",
        f"reference: optical finesse    ~ {REFERENCE_FINESSE:.3g}",
    ]
    return "\n".join(lines) + "\n"


def _positive(text):
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return value


def _nonnegative(text):
    value = float(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be nonnegative, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="weakoptomech", description="Weak-measurement amplification in optomechanics."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    fig = sub.add_parser("figure", help="print a figure's curves as CSV")
    fig.add_argument("name", help=", ".join(FIGURES))

    sw = sub.add_parser("sweep", help="evaluate outputs over a parameter/time grid")
    sw.add_argument("--config", required=True, help="key = value file")

    oc = sub.add_parser("oracle-check", help="compare closed forms with the Fock oracle")
    oc.add_argument("--tol", type=_positive, help="override every tolerance")
    oc.add_argument("--no-damped", action="store_true", help="skip the Lindblad comparisons")

    fe = sub.add_parser("feasibility", help="dark-count feasibility report")
    fe.add_argument("--fm", type=_positive, required=True, help="mechanical frequency (Hz)")
    fe.add_argument("--kappa-ratio", type=_positive, required=True)
    fe.add_argument("--dark-rate", type=_nonnegative, required=True, help="dark counts (Hz)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = sys.stdout
    try:
        if args.command == "figure":
            out.write(format_csv(*figure_table(args.name)))
        elif args.command == "sweep":
            try:
                with open(args.config, encoding="utf-8") as fh:
                    text = fh.read()
            except OSError as exc:
                print(f"error: cannot read config: {exc}", file=sys.stderr)
                return 2
            out.write(format_csv(*sweep_table(parse_config(text))))
        elif args.command == "oracle-check":
            tols = {}
            if args.tol is not None:
                tols = dict(tol_closed=args.tol, tol_damped=args.tol, tol_prob=args.tol)
            report = run_oracle_check(damped=not args.no_damped, **tols)
            out.write(report.text())
            return 0 if report.ok else 1
        else:
            out.write(feasibility_report(args.fm, args.kappa_ratio, args.dark_rate))
    except UnknownFigure as exc:
        print(f"error: unknown figure {exc.args[0]!r}; choose from {', '.join(FIGURES)}",
              file=sys.stderr)
        return 2
    except ConfigParse as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except WeakOptomechError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except BrokenPipeError:
        # reader went away (``| head``); silence the flush at exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
    return 0


if __name__ == "__main__":
    sys.exit(main())
