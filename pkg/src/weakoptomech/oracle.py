"""Brute-force truncated-Fock oracle.

Everything here works directly with number-basis matrices: Hamiltonians are
exponentiated with :func:`scipy.linalg.expm` and the master equation is
stepped with classical fourth-order Runge-Kutta. Nothing is taken from the
closed forms in the rest of the package, so agreement is a real check.

Single-photon joint states are arrays of shape ``(2, N)``: row 0 holds the
mirror amplitudes with the photon in the optomechanical arm A, row 1 with the
photon in the rigid arm B. Joint density matrices are ``(2N, 2N)`` in the same
ordering. Time is ``omega_m t`` and ``hbar = omega_m = 1``.
"""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
import scipy.sparse as sp
from scipy.linalg import expm
from scipy.special import gammaln

from .errors import CutoffTooSmall, DegenerateNorm, StepTooLarge
from .params import GenericWeakParams, ModelParams

DEFAULT_CUTOFF = 64
MAX_CUTOFF = 256
TAIL_TOL = 1e-12
RK4_STEP = 1e-4
TRACE_TOL = 1e-9
#: Extent of the RK4 stability region along the imaginary axis.
RK4_IMAG_LIMIT = 2.0 * math.sqrt(2.0)


# -- operators --------------------------------------------------------------

def annihilation(n: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, n, dtype=float)), 1)


def number(n: int) -> np.ndarray:
    return np.diag(np.arange(n, dtype=float))


def position(n: int) -> np.ndarray:
    """``c + c^dag`` (q in units of sigma)."""
    c = annihilation(n)
    return c + c.T


def momentum(n: int) -> np.ndarray:
    """``(c - c^dag) / i`` (p in units of hbar / 2 sigma)."""
    c = annihilation(n)
    return (c - c.T) / 1j


def mirror_hamiltonian(n: int, coupling: float) -> np.ndarray:
    """``c^dag c - coupling (c + c^dag)``."""
    return number(n) - coupling * position(n)


# -- states -----------------------------------------------------------------

def tail_population(state, fraction: float = 0.1) -> float:
    """Fraction of population in the top ``fraction`` of mirror levels.

    Accepts a mirror vector ``(N,)``, a single-photon joint vector ``(2, N)``
    or a mirror density matrix ``(N, N)``.
    """
    a = np.asarray(state)
    if a.ndim == 2 and a.shape[0] == a.shape[1] and a.shape[0] > 2:
        pops = np.real(np.diag(a))
    else:
        pops = (np.abs(a) ** 2).reshape(-1, a.shape[-1]).sum(axis=0)
    n = pops.size
    top = max(1, int(math.ceil(fraction * n)))
    total = pops.sum()
    return float(pops[n - top:].sum() / total) if total > 0 else 0.0


def coherent_fock(alpha, n: int = DEFAULT_CUTOFF, tail_tol: float = TAIL_TOL) -> np.ndarray:
    """Normalised number-basis expansion of ``|alpha>``.

    Raises :class:`CutoffTooSmall` if the discarded population exceeds ``tail_tol``.
    """
    alpha = complex(alpha)
    levels = np.arange(n)
    vec = np.zeros(n, dtype=complex)
    r = abs(alpha)
    if r == 0:
        vec[0] = 1.0
        return vec
    logmag = -0.5 * r * r + levels * math.log(r) - 0.5 * gammaln(levels + 1)
    vec = np.exp(logmag) * np.exp(1j * levels * np.angle(alpha))
    kept = float(np.sum(np.abs(vec) ** 2))
    if 1.0 - kept > tail_tol:
        raise CutoffTooSmall(f"cutoff {n} drops population {1 - kept:.3g} of |{alpha}>")
    return vec / math.sqrt(kept)


def required_cutoff(radius: float, tail_tol: float = TAIL_TOL, minimum: int = 8) -> int:
    """Smallest cutoff holding a coherent state of modulus ``radius`` to ``tail_tol``.

    Adds a 20% margin so the top tenth of levels stays essentially empty.
    """
    mean = radius * radius
    n = minimum
    while True:
        levels = np.arange(n)
        logp = -mean + levels * (math.log(mean) if mean > 0 else 0.0) - gammaln(levels + 1)
        if mean == 0:
            return minimum
        if 1.0 - np.exp(logp).sum() < tail_tol:
            return max(minimum, int(math.ceil(1.2 * n)))
        n += 1


def single_photon_state(alpha, n: int = DEFAULT_CUTOFF) -> np.ndarray:
    """Photon split by the first beam splitter, mirror in ``|alpha>``."""
    mirror = coherent_fock(alpha, n)
    return np.vstack([mirror, mirror]) / math.sqrt(2.0)


def as_density(state: np.ndarray) -> np.ndarray:
    v = np.asarray(state).reshape(-1)
    return np.outer(v, v.conj())


# -- closed evolution -------------------------------------------------------

def _check_tail(state, tail_tol):
    tail = tail_population(state)
    if tail > tail_tol:
        raise CutoffTooSmall(f"tail population {tail:.3g} exceeds {tail_tol:.3g}")


def evolve_closed(
    state: np.ndarray,
    p: ModelParams,
    wt: float,
    method: str = "block",
    cavity_ratio: float = 0.0,
    tail_tol: float = TAIL_TOL,
) -> np.ndarray:
    """Apply ``exp(-i H wt)`` to a single-photon joint state ``(2, N)``.

    ``method="block"`` exponentiates each photon branch's mirror Hamiltonian
    separately (photon number is conserved); ``"joint"`` builds and
    exponentiates the full photon-A/photon-B/mirror Hamiltonian instead.
    ``cavity_ratio`` is ``omega_0 / omega_m``.
    """
    state = np.asarray(state, dtype=complex)
    n = state.shape[1]
    if method == "block":
        ua = expm(-1j * wt * mirror_hamiltonian(n, p.k))
        ub = np.exp(-1j * wt * np.arange(n))
        out = np.vstack([ua @ state[0], ub * state[1]]) * np.exp(-1j * cavity_ratio * wt)
    elif method == "joint":
        full = embed_single_photon(state)
        full = expm(-1j * wt * joint_hamiltonian(p, n, cavity_ratio)) @ full
        out = extract_single_photon(full, n)
    else:
        raise ValueError(f"unknown method {method!r}")
    _check_tail(out, tail_tol)
    return out


def joint_hamiltonian(p: ModelParams, n: int, cavity_ratio: float = 0.0) -> np.ndarray:
    """``w0 (a^dag a + b^dag b) + c^dag c - k a^dag a (c + c^dag)`` on photon
    occupations ``{0,1} x {0,1}`` times ``N`` mirror levels (ordering a, b, c)."""
    a = annihilation(2)
    na = a.T @ a
    eye2, eyen = np.eye(2), np.eye(n)
    photons = np.kron(np.kron(na, eye2) + np.kron(eye2, na), eyen)
    mech = np.kron(np.kron(eye2, eye2), number(n))
    coupling = np.kron(np.kron(na, eye2), position(n))
    return cavity_ratio * photons + mech - p.k * coupling


def embed_single_photon(state: np.ndarray) -> np.ndarray:
    """Map ``(2, N)`` onto the ``4N`` joint vector (|1_A 0_B> and |0_A 1_B>)."""
    n = state.shape[1]
    full = np.zeros(4 * n, dtype=complex)
    full[2 * n:3 * n] = state[0]  # a=1, b=0
    full[n:2 * n] = state[1]  # a=0, b=1
    return full


def extract_single_photon(full: np.ndarray, n: int) -> np.ndarray:
    return np.vstack([full[2 * n:3 * n], full[n:2 * n]])


def total_photon_number(full: np.ndarray, n: int) -> float:
    a = annihilation(2)
    na = a.T @ a
    op = np.kron(np.kron(na, np.eye(2)) + np.kron(np.eye(2), na), np.eye(n))
    return float(np.real(np.vdot(full, op @ full)) / np.real(np.vdot(full, full)))


# -- generic two-level model ------------------------------------------------

def generic_evolution(p: GenericWeakParams, n: int = DEFAULT_CUTOFF) -> np.ndarray:
    """``exp[-eta sigma_z (c - c^dag)] |+>|alpha>`` as a ``(2, N)`` array
    indexed by the system eigenstate (rows ``|0>_s``, ``|1>_s``)."""
    c = annihilation(n)
    gen = c - c.T
    mirror = coherent_fock(p.alpha, n)
    rows = [expm(-p.eta * gen) @ mirror, expm(p.eta * gen) @ mirror]
    out = np.vstack(rows) / math.sqrt(2.0)
    _check_tail(out, TAIL_TOL)
    return out


def postselect_system(state: np.ndarray, bra) -> tuple[np.ndarray, float]:
    """Contract the system index of a ``(2, N)`` state with ``bra`` (already conjugated)."""
    bra = np.asarray(bra, dtype=complex)
    mirror = bra[0] * state[0] + bra[1] * state[1]
    return mirror, float(np.real(np.vdot(mirror, mirror)))


# -- dark-port postselection and moments -----------------------------------

def postselect_dark(state: np.ndarray):
    """Project arm photon on ``(|1_A 0_B> - |0_A 1_B>)/sqrt(2)``.

    Returns the unnormalised mirror vector (for a ``(2, N)`` state) or density
    matrix (for a ``(2N, 2N)`` density), and the success probability.
    """
    a = np.asarray(state)
    if a.ndim == 2 and a.shape[0] == 2:
        return postselect_system(a, np.array([1.0, -1.0]) / math.sqrt(2.0))
    n = a.shape[0] // 2
    m00, m01 = a[:n, :n], a[:n, n:]
    m10, m11 = a[n:, :n], a[n:, n:]
    rho = 0.5 * (m00 - m01 - m10 + m11)
    return rho, float(np.real(np.trace(rho)))


def _expect(state, op):
    a = np.asarray(state)
    if a.ndim == 1:
        norm = np.real(np.vdot(a, a))
        val = np.vdot(a, op @ a)
    else:
        norm = np.real(np.trace(a))
        val = np.trace(a @ op)
    if not norm > 0:
        raise DegenerateNorm("state has zero norm")
    return float(np.real(val) / norm)


def expect_q_fock(state) -> float:
    """Normalised ``<q>`` (units sigma) of a mirror vector or density matrix."""
    return _expect(state, position(np.asarray(state).shape[0]))


def expect_p_fock(state) -> float:
    """Normalised ``<p>`` (units hbar / 2sigma) of a mirror vector or density matrix."""
    return _expect(state, momentum(np.asarray(state).shape[0]))


# -- master equation --------------------------------------------------------

def _block_generator(n, k_left, k_right, gamma):
    """Sparse generator acting on row-major ``vec(M)`` for
    ``dM/dt = -i(H_l M - M H_r) + gamma (c M c^dag - {c^dag c, M}/2)``."""
    c = sp.csr_matrix(annihilation(n))
    num = sp.csr_matrix(number(n))
    eye = sp.identity(n, format="csr")
    h_l = num - k_left * (c + c.T)
    h_r = num - k_right * (c + c.T)
    gen = -1j * (sp.kron(h_l, eye) - sp.kron(eye, h_r.T))
    if gamma:
        gen = gen + gamma * (sp.kron(c, c) - 0.5 * (sp.kron(num, eye) + sp.kron(eye, num)))
    return gen.tocsr()


@lru_cache(maxsize=12)
def _rk4_power(n, k_left, k_right, gamma, h, steps):
    """Increment ``R(hL)^steps - 1`` where ``R(z) = 1 + z + z^2/2 + z^3/6 + z^4/24``.

    For a linear, time-independent generator one classical RK4 step is
    exactly multiplication by ``R(hL)``. The power is built by squaring the
    increment ``E`` (``(1 + E)^2 = 1 + 2E + E^2``) so the identity never
    swamps the small per-step change.
    """
    a = h * _block_generator(n, k_left, k_right, gamma).toarray()
    eye = np.eye(a.shape[0], dtype=complex)
    inc = a @ (eye + a @ (eye + a @ (eye + a / 4.0) / 3.0) / 2.0)
    acc = None
    while steps:
        if steps & 1:
            acc = inc if acc is None else acc + inc + acc @ inc
        steps >>= 1
        if steps:
            inc = 2.0 * inc + inc @ inc
    return acc


def _rk4_rhs(m, k_left, k_right, gamma, sq, lev):
    cm = np.zeros_like(m)
    cm[:-1] = sq[:, None] * m[1:]
    cdm = np.zeros_like(m)
    cdm[1:] = sq[:, None] * m[:-1]
    mc = np.zeros_like(m)
    mc[:, 1:] = m[:, :-1] * sq[None, :]
    mcd = np.zeros_like(m)
    mcd[:, :-1] = m[:, 1:] * sq[None, :]
    nm = lev[:, None] * m
    mn = m * lev[None, :]
    out = -1j * ((nm - k_left * (cm + cdm)) - (mn - k_right * (mc + mcd)))
    if gamma:
        cmcd = np.zeros_like(m)
        cmcd[:-1] = sq[:, None] * mcd[1:]
        out += gamma * (cmcd - 0.5 * (nm + mn))
    return out


_BLOCKS = ((0, 0), (0, 1), (1, 1))


def _split(rho, n):
    return {(i, j): rho[i * n:(i + 1) * n, j * n:(j + 1) * n].copy() for i, j in _BLOCKS}


def _join(blocks, n):
    rho = np.empty((2 * n, 2 * n), dtype=complex)
    for (i, j), m in blocks.items():
        rho[i * n:(i + 1) * n, j * n:(j + 1) * n] = m
    rho[n:, :n] = blocks[(0, 1)].conj().T
    return rho


def _advance(blocks, p, h, steps, method, n):
    kk = {0: p.k, 1: 0.0}
    if method == "power":
        out = {}
        for (i, j), m in blocks.items():
            inc = _rk4_power(n, kk[i], kk[j], p.gamma, h, steps)
            out[(i, j)] = m + (inc @ m.reshape(-1)).reshape(n, n)
        for key in ((0, 0), (1, 1)):
            out[key] = 0.5 * (out[key] + out[key].conj().T)
        return out
    if method == "loop":
        sq = np.sqrt(np.arange(1, n, dtype=float))
        lev = np.arange(n, dtype=float)
        out = dict(blocks)
        for _ in range(steps):
            for (i, j), m in out.items():
                args = (kk[i], kk[j], p.gamma, sq, lev)
                k1 = _rk4_rhs(m, *args)
                k2 = _rk4_rhs(m + 0.5 * h * k1, *args)
                k3 = _rk4_rhs(m + 0.5 * h * k2, *args)
                k4 = _rk4_rhs(m + h * k3, *args)
                m = m + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
                if i == j:
                    m = 0.5 * (m + m.conj().T)
                out[(i, j)] = m
        return out
    raise ValueError(f"unknown method {method!r}")


def _check_step(n, p, step):
    """Refuse steps outside the RK4 stability region of the truncated generator.

    RK4 conserves the trace exactly for any step (the generator is
    trace-free), so an unstable step shows up in the coherences first.
    """
    bound = (n - 1) * (1.0 + p.gamma) + 2.0 * p.k * math.sqrt(n)
    if step * bound > RK4_IMAG_LIMIT:
        raise StepTooLarge(f"step {step} exceeds the RK4 stability limit {RK4_IMAG_LIMIT / bound:.3g}")


def lindblad_trajectory(
    rho: np.ndarray,
    p: ModelParams,
    times,
    step: float = RK4_STEP,
    method: str = "power",
    tail_tol: float = TAIL_TOL,
):
    """Joint densities at each of the increasing ``times`` (first may be 0).

    Each interval between output times is covered by the smallest number of
    equal RK4 steps not exceeding ``step``. ``method="power"`` applies the
    per-step RK4 map as a precomputed matrix power (diagonal blocks are
    re-symmetrised at output times); ``"loop"`` steps explicitly and
    re-symmetrises every step.
    """
    rho = np.asarray(rho, dtype=complex)
    n = rho.shape[0] // 2
    _check_step(n, p, step)
    trace0 = float(np.real(np.trace(rho)))
    blocks = _split(rho, n)
    out = []
    t = 0.0
    for target in np.asarray(times, dtype=float):
        dt = target - t
        if dt < 0:
            raise ValueError("times must be nondecreasing and nonnegative")
        if dt > 0:
            steps = int(math.ceil(dt / step - 1e-9))
            h = round(dt / steps, 15)
            blocks = _advance(blocks, p, h, steps, method, n)
            t = target
        current = _join(blocks, n)
        drift = abs(float(np.real(np.trace(current))) - trace0)
        if drift > TRACE_TOL:
            raise StepTooLarge(f"trace drift {drift:.3g} at wt={target}")
        pops = np.real(np.diag(blocks[(0, 0)]) + np.diag(blocks[(1, 1)]))
        top = max(1, int(math.ceil(0.1 * n)))
        if pops[n - top:].sum() / pops.sum() > tail_tol:
            raise CutoffTooSmall(f"tail population exceeds {tail_tol:.3g} at wt={target}")
        out.append(current)
    return out


def evolve_lindblad(rho, p: ModelParams, wt: float, step: float = RK4_STEP, method="power"):
    """Joint density at ``wt`` under the damped master equation."""
    return lindblad_trajectory(rho, p, [wt], step=step, method=method)[0]


def evolve_mirror_density(rho, coupling: float, gamma: float, wt: float, step=RK4_STEP):
    """Mirror-only density evolved under ``c^dag c - coupling (c + c^dag)`` with damping."""
    rho = np.asarray(rho, dtype=complex)
    n = rho.shape[0]
    steps = max(1, int(math.ceil(wt / step - 1e-9)))
    inc = _rk4_power(n, coupling, coupling, gamma, round(wt / steps, 15), steps)
    return rho + (inc @ rho.reshape(-1)).reshape(n, n)
