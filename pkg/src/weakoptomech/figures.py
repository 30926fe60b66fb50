"""Parameter sets and curve tables behind the published figures."""
from __future__ import annotations

import math

import numpy as np

from .closed import mean_p_closed, mean_q_closed
from .damped import mean_p_damped, mean_q_damped
from .detection import conditional_arrival_density
from .errors import UnknownFigure
from .params import ModelParams

K_FIG = 0.005
PI = math.pi

FIG2A = ((0.5, 0.0), (1.0, PI / 3), (2.0, 5 * PI / 12), (4.0, PI / 2))
FIG2B = ((0.5, PI), (1.0, 4 * PI / 3), (2.0, 17 * PI / 12), (4.0, 3 * PI / 2))
FIG4 = (1 / math.sqrt(2), PI / 4)
FIG4_GAMMAS = (0.0, 0.005)
FIG5A = ((4.0, 0.0), (4.0, PI))
FIG5B = ((0.5, PI / 2), (0.5, 3 * PI / 2))
FIG6 = (0.5, 0.0)
FIG6_KAPPAS = (1.0, 5.0, 10.0)

TIME_GRID = (0.0, 4 * PI, 2001)
FIG6_GRID = (0.0, 1.0, 2001)
FIG3_GRID = ((0.0, 4.0, 101), (0.0, 2 * PI, 101))
FIG3_TIME = 0.001

FIGURES = ("fig2a", "fig2b", "fig3", "fig4a", "fig4b", "fig5a", "fig5b", "fig6")


def closed_sets():
    """``(label, ModelParams)`` for every undamped curve in Figs. 2, 4 and 5."""
    pairs = FIG2A + FIG2B + (FIG4,) + FIG5A + FIG5B
    names = ["fig2a"] * 4 + ["fig2b"] * 4 + ["fig4"] + ["fig5a"] * 2 + ["fig5b"] * 2
    return [
        (f"{name}:|a|={a:.6g},th={th:.6g}", ModelParams(k=K_FIG, alpha_abs=a, theta=th))
        for name, (a, th) in zip(names, pairs)
    ]


def _label(prefix, a, th, extra=""):
    return f"{prefix}_alpha{a:.6g}_theta{th:.6g}{extra}"


def _grid(spec):
    start, stop, count = spec
    return np.linspace(start, stop, count)


def figure_table(name: str):
    """Header and columns for figure ``name``; the first column is the sweep variable."""
    if name not in FIGURES:
        raise UnknownFigure(name)
    if name == "fig3":
        (a0, a1, na), (t0, t1, nt) = FIG3_GRID
        aa, tt = np.meshgrid(np.linspace(a0, a1, na), np.linspace(t0, t1, nt), indexing="ij")
        aa, tt = aa.ravel(), tt.ravel()
        q = np.array([
            mean_q_closed(ModelParams(k=K_FIG, alpha_abs=a, theta=t), FIG3_TIME)
            for a, t in zip(aa, tt)
        ])
        return ["alpha_abs", "theta", "q_over_sigma"], [aa, tt, q]
    if name == "fig6":
        x = _grid(FIG6_GRID)
        p = ModelParams(k=K_FIG, alpha_abs=FIG6[0], theta=FIG6[1])
        header = ["omega_m_t"] + [f"density_kappa{K:g}" for K in FIG6_KAPPAS]
        return header, [x] + [conditional_arrival_density(p, K, x) for K in FIG6_KAPPAS]

    x = _grid(TIME_GRID)
    header, cols = ["omega_m_t"], [x]
    if name in ("fig2a", "fig2b", "fig5a", "fig5b"):
        sets = {"fig2a": FIG2A, "fig2b": FIG2B, "fig5a": FIG5A, "fig5b": FIG5B}[name]
        fn, prefix = (mean_q_closed, "q") if name.startswith("fig2") else (mean_p_closed, "p")
        for a, th in sets:
            header.append(_label(prefix, a, th))
            cols.append(fn(ModelParams(k=K_FIG, alpha_abs=a, theta=th), x))
    else:
        fn, prefix = (mean_q_damped, "q") if name == "fig4a" else (mean_p_damped, "p")
        a, th = FIG4
        for g in FIG4_GAMMAS:
            header.append(_label(prefix, a, th, f"_gamma{g:g}"))
            cols.append(fn(ModelParams(k=K_FIG, alpha_abs=a, theta=th, gamma=g), x))
    return header, cols


def format_csv(header, columns) -> str:
    """CSV text with 17 significant digits and ``\\n`` line ends."""
    rows = [",".join(header)]
    for row in zip(*columns):
        rows.append(",".join(format(float(v), ".17g") for v in row))
    return "\n".join(rows) + "\n"
