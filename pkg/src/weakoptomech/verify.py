"""Cross-checks of the closed forms against the number-basis oracle."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import oracle
from .closed import mean_p_closed, mean_q_closed, postselected_probability
from .damped import mean_p_damped, mean_q_damped
from .errors import CutoffTooSmall, ZeroProbability
from .detection import averaged_q
from .figures import closed_sets
from .params import ModelParams

CLOSED_TOL = 1e-6
DAMPED_TOL = 1e-4
PROB_TOL = 1e-10
CONVERGENCE_TOL = 1e-6
CUTOFF_CONVERGENCE_TOL = 1e-8
DAMPED_GAMMA = 0.005
DAMPED_MAX_ALPHA = 1.0
#: Scale below which a moment counts as zero (units sigma or hbar/2sigma). At
#: wt = 2 pi n both branches return to the same label and <q>, <p> vanish
#: exactly, so a plain relative error would compare round-off with round-off.
ZERO_FLOOR = 1e-4


def oracle_grid(count: int = 20):
    """``count`` evenly spaced times on ``(0, 2 pi]``."""
    return np.linspace(0.0, 2 * np.pi, count + 1)[1:]


def relative_error(value, reference, floor=ZERO_FLOOR):
    """``|value - reference| / max(|reference|, floor)``."""
    value, reference = np.asarray(value, dtype=float), np.asarray(reference, dtype=float)
    return np.abs(value - reference) / np.maximum(np.abs(reference), floor)


@dataclass
class CheckResult:
    name: str
    worst: float = 0.0
    tolerance: float = 0.0
    where: str = ""
    skipped: str | None = None

    @property
    def passed(self) -> bool:
        return self.skipped is not None or self.worst <= self.tolerance

    def line(self) -> str:
        if self.skipped is not None:
            return f"SKIP  {self.name}: {self.skipped}"
        tag = "ok  " if self.passed else "FAIL"
        return f"{tag}  {self.name}: worst {self.worst:.3e} (tol {self.tolerance:.1e}) at {self.where}"


@dataclass
class Report:
    results: list[CheckResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.results)

    def text(self) -> str:
        return "\n".join(r.line() for r in self.results) + "\n"


def _record(result, label, xs, errors):
    i = int(np.argmax(errors))
    if errors[i] > result.worst or not result.where:
        result.worst = float(errors[i])
        result.where = f"{label}, wt={xs[i]:.6g}"


def initial_state(alpha, cutoff: int = oracle.DEFAULT_CUTOFF):
    """Single-photon joint state, doubling the cutoff until the tail test passes."""
    while True:
        try:
            return oracle.single_photon_state(alpha, cutoff)
        except CutoffTooSmall:
            if 2 * cutoff > oracle.MAX_CUTOFF:
                raise
            cutoff *= 2


def closed_oracle(p: ModelParams, xs, cutoff: int = oracle.DEFAULT_CUTOFF):
    """Oracle ``<q>``, ``<p>`` (relative to the photon-free branch) and success probability."""
    s0 = initial_state(p.alpha, cutoff)
    q, mom, prob = [], [], []
    for x in xs:
        s = oracle.evolve_closed(s0, p, x)
        mirror, pr = oracle.postselect_dark(s)
        ref = s[1]
        q.append(oracle.expect_q_fock(mirror) - oracle.expect_q_fock(ref))
        mom.append(oracle.expect_p_fock(mirror) - oracle.expect_p_fock(ref))
        prob.append(pr)
    return np.array(q), np.array(mom), np.array(prob)


def damped_oracle(p: ModelParams, xs, cutoff: int, step: float = oracle.RK4_STEP):
    """Lindblad-oracle ``<q>``, ``<p>`` and success probability on ``xs``."""
    rho = oracle.as_density(oracle.single_photon_state(p.alpha, cutoff))
    q, mom, prob = [], [], []
    for r in oracle.lindblad_trajectory(rho, p, xs, step=step):
        mirror, pr = oracle.postselect_dark(r)
        ref = r[cutoff:, cutoff:]
        q.append(oracle.expect_q_fock(mirror) - oracle.expect_q_fock(ref))
        mom.append(oracle.expect_p_fock(mirror) - oracle.expect_p_fock(ref))
        prob.append(pr)
    return np.array(q), np.array(mom), np.array(prob)


def damped_cutoff(p: ModelParams) -> int:
    """Cutoff for the Lindblad oracle: the initial label plus the largest branch shift."""
    return oracle.required_cutoff(p.alpha_abs + 2 * p.k, tail_tol=1e-14)


def check_closed(sets=None, xs=None, tol=CLOSED_TOL, prob_tol=PROB_TOL,
                 conv_tol=CUTOFF_CONVERGENCE_TOL, cutoff=oracle.DEFAULT_CUTOFF):
    sets = closed_sets() if sets is None else sets
    xs = oracle_grid() if xs is None else xs
    rq = CheckResult("closed <q> vs Fock oracle", tolerance=tol)
    rp = CheckResult("closed <p> vs Fock oracle", tolerance=tol)
    rpr = CheckResult("success probability vs oracle norm", tolerance=prob_tol)
    rc = CheckResult("closed oracle cutoff doubling", tolerance=conv_tol)
    for label, p in sets:
        q, mom, prob = closed_oracle(p, xs, cutoff)
        q2, mom2, _ = closed_oracle(p, xs, 2 * cutoff)
        _record(rq, label, xs, relative_error(mean_q_closed(p, xs), q))
        _record(rp, label, xs, relative_error(mean_p_closed(p, xs), mom))
        _record(rpr, label, xs, relative_error(postselected_probability(p, xs), prob, floor=0.0))
        _record(rc, label, xs, np.maximum(np.abs(q2 - q), np.abs(mom2 - mom)))
    return [rq, rp, rpr, rc]


def damped_sets(gamma=DAMPED_GAMMA, max_alpha=DAMPED_MAX_ALPHA):
    return [
        (f"{label},gamma={gamma:g}", p.with_(gamma=gamma))
        for label, p in closed_sets()
        if p.alpha_abs <= max_alpha
    ]


def check_damped(sets=None, xs=None, tol=DAMPED_TOL, conv_tol=CONVERGENCE_TOL,
                 step=oracle.RK4_STEP, convergence=True):
    sets = damped_sets() if sets is None else sets
    xs = oracle_grid() if xs is None else xs
    rq = CheckResult("damped <q> vs Lindblad oracle", tolerance=tol)
    rp = CheckResult("damped <p> vs Lindblad oracle", tolerance=tol)
    rs = CheckResult("Lindblad step halving", tolerance=conv_tol)
    rc = CheckResult("Lindblad cutoff increase", tolerance=conv_tol)
    results = [rq, rp]
    if convergence:
        results += [rs, rc]
    for i, (label, p) in enumerate(sets):
        n = damped_cutoff(p)
        q, mom, _ = damped_oracle(p, xs, n, step)
        _record(rq, label, xs, relative_error(mean_q_damped(p, xs), q))
        _record(rp, label, xs, relative_error(mean_p_damped(p, xs), mom))
        if convergence:
            qh, mh, _ = damped_oracle(p, xs, n, step / 2)
            _record(rs, label, xs, np.maximum(np.abs(qh - q), np.abs(mh - mom)))
            # one set is enough to show the cutoff is converged; larger ones are slow
            if i == 0:
                qn, mn, _ = damped_oracle(p, xs, n + 8, step)
                _record(rc, label, xs, np.maximum(np.abs(qn - q), np.abs(mn - mom)))
    return results


def check_zero_coupling():
    """The ``k = 0`` edge: nothing reaches the dark port, so there is nothing to compare."""
    p = ModelParams(k=0.0, alpha_abs=0.5)
    try:
        averaged_q(p, 10.0)
    except ZeroProbability:
        return CheckResult("k=0 edge set", skipped="zero postselection probability (by design)")
    return CheckResult("k=0 edge set", worst=math.inf, tolerance=0.0, where="expected ZeroProbability")


def run_oracle_check(tol_closed=CLOSED_TOL, tol_damped=DAMPED_TOL, tol_prob=PROB_TOL,
                     damped=True) -> Report:
    report = Report()
    report.results += check_closed(tol=tol_closed, prob_tol=tol_prob)
    if damped:
        report.results += check_damped(tol=tol_damped)
    report.results.append(check_zero_coupling())
    return report
