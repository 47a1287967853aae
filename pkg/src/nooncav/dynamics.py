"""Lindblad master-equation propagation and steady states.

The quantum master equation in the frame rotating at the pump frequency is

    drho/dt = -i [H'_eff + H_pump, rho]
              + kappa * sum_j ( a_j rho a_j^dag - {a_j^dag a_j, rho}/2 )

with equal loss on both cavities.  Pulsed runs use an adaptive embedded
Dormand-Prince 5(4) integrator on the density matrix; time-independent
segments may use Krylov evaluation of the matrix exponential.  Steady states
are obtained from the trace-constrained linear system L rho = 0.  Because the
pump is the only term changing the total excitation number, ordering the
vectorized basis by the bra/ket excitation difference makes the Liouvillian
block-tridiagonal, which both speeds up the sparse factorization and enables
a dense block-elimination path that yields the equal-excitation sector alone
for large spaces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .design import ges_vector_n2, one_photon_vectors, solve_ges_n4
from .hilbert import HilbertSpace, Operator, annihilator, build_space
from .model import (
    Params,
    ParamsN2,
    ParamsN4,
    default_n_max,
    hamiltonian,
    pump_term,
    rotating_frame,
    total_hamiltonian,
)


class NumericsError(RuntimeError):
    """A numerical routine failed; carries diagnostic context."""

    def __init__(self, message: str, residual: float | None = None, time: float | None = None):
        super().__init__(message)
        self.residual = residual
        self.time = time


# ---------------------------------------------------------------------------
# Density matrices
# ---------------------------------------------------------------------------

@dataclass
class DensityMatrix:
    """Hermitian unit-trace state on a Hilbert space."""

    space: HilbertSpace
    mat: np.ndarray

    HERM_TOL = 1e-10
    TRACE_TOL = 1e-8
    PSD_TOL = 1e-8

    def trace(self) -> float:
        return float(np.trace(self.mat).real)

    def hermiticity_defect(self) -> float:
        return float(np.max(np.abs(self.mat - self.mat.conj().T)))

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(0.5 * (self.mat + self.mat.conj().T))[0])

    def validate(self) -> "DensityMatrix":
        herm = self.hermiticity_defect()
        if herm > self.HERM_TOL:
            raise NumericsError(f"density matrix not Hermitian: defect {herm:.3e}")
        tr = self.trace()
        if abs(tr - 1.0) > self.TRACE_TOL:
            raise NumericsError(f"density matrix trace {tr} deviates from 1")
        lam = self.min_eigenvalue()
        if lam < -self.PSD_TOL:
            raise NumericsError(f"density matrix not positive: min eigenvalue {lam:.3e}")
        return self

    def expectation(self, op: np.ndarray) -> complex:
        return complex(np.trace(op @ self.mat))

    def population(self, vector: np.ndarray) -> float:
        return float(np.real(vector.conj() @ self.mat @ vector))

    @staticmethod
    def from_state(space: HilbertSpace, vector: np.ndarray) -> "DensityMatrix":
        v = np.asarray(vector, dtype=complex)
        v = v / np.linalg.norm(v)
        return DensityMatrix(space, np.outer(v, v.conj()))

    @staticmethod
    def vacuum(space: HilbertSpace) -> "DensityMatrix":
        return DensityMatrix.from_state(space, space.basis_vector("G", 0, 0))


# ---------------------------------------------------------------------------
# Liouvillian construction
# ---------------------------------------------------------------------------

def lindblad_rhs(h_total: np.ndarray, kappa: float, a_ops, rho: np.ndarray) -> np.ndarray:
    """Right-hand side of the master equation for a (batch of) rho.

    Supports leading batch dimensions: rho of shape (..., d, d).
    """
    out = -1j * (h_total @ rho - rho @ h_total)
    if kappa != 0.0:
        for a, adag, n in a_ops:
            out += kappa * (a @ rho @ adag - 0.5 * (n @ rho + rho @ n))
    return out


def _a_triples(space: HilbertSpace):
    triples = []
    for cav in (1, 2):
        a = annihilator(space, cav).mat
        adag = a.conj().T
        triples.append((a, adag, adag @ a))
    return triples


def liouvillian_apply(h_total: Operator, kappa: float, rho: DensityMatrix) -> np.ndarray:
    """Generator applied once: returns d(rho)/dt as a plain matrix."""
    if rho.space != h_total.space:
        raise ValueError("state and Hamiltonian live on different spaces")
    return lindblad_rhs(h_total.mat, kappa, _a_triples(h_total.space), rho.mat)


def build_liouvillian(h_total: Operator, kappa: float) -> sp.csc_matrix:
    """Sparse superoperator in C-order vectorization (vec(rho) = rho.ravel())."""
    space = h_total.space
    d = space.dim
    eye = sp.identity(d, format="csr")
    hs = sp.csr_matrix(h_total.mat)
    liou = -1j * (sp.kron(hs, eye) - sp.kron(eye, hs.T))
    if kappa != 0.0:
        for a, adag, n in _a_triples(space):
            a_s = sp.csr_matrix(a)
            n_s = sp.csr_matrix(n)
            liou = liou + kappa * (
                sp.kron(a_s, a_s.conj())
                - 0.5 * (sp.kron(n_s, eye) + sp.kron(eye, n_s.T))
            )
    return liou.tocsc()


@dataclass
class AssembledSystem:
    """Parameter set realized on a concrete space, ready to propagate."""

    params: Params
    space: HilbertSpace
    h_rot: np.ndarray  # rotating-frame Hamiltonian, no pump
    pump_op: np.ndarray  # (a_k + a_k^dag), unit amplitude
    a_ops: list

    @property
    def kappa(self) -> float:
        return self.params.kappa

    def h_total(self, rabi: float | None = None) -> np.ndarray:
        amp = self.params.rabi if rabi is None else rabi
        return self.h_rot + amp * self.pump_op

    def liouvillian(self, rabi: float | None = None) -> sp.csc_matrix:
        h = Operator(self.space, self.h_total(rabi))
        return build_liouvillian(h, self.kappa)


def assembled(p: Params, n_max: int | None = None) -> AssembledSystem:
    space = build_space(p.model, n_max if n_max is not None else default_n_max(p))
    h_rot = rotating_frame(hamiltonian(p, space), p.pump_detuning, space).mat
    pump = pump_term(p.with_pump(1.0, p.pump_detuning), space).mat
    return AssembledSystem(p, space, h_rot, pump, _a_triples(space))


# ---------------------------------------------------------------------------
# Adaptive Dormand-Prince 5(4) integrator (batch-capable)
# ---------------------------------------------------------------------------

_DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_DP_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_DP_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_DP_ERR = _DP_B5 - np.array(
    [5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40]
)


def integrate_rk45(f, t_grid, y0, rtol: float = 1e-9, atol: float = 1e-12, max_step=np.inf):
    """Adaptive RK5(4) over a sorted time grid; yields y at every grid point.

    ``y0`` may have any shape (e.g. a batch of density matrices); the error
    norm is an RMS over all entries.  Steps land exactly on grid points.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or np.any(np.diff(t_grid) <= 0):
        raise ValueError("t_grid must be strictly increasing")
    t = float(t_grid[0])
    y = np.array(y0, dtype=complex)
    outputs = [y.copy()]
    k = [None] * 7
    k[0] = f(t, y)
    h = min(1e-3, max_step)
    for t_stop in t_grid[1:]:
        while t < t_stop:
            h = min(h, max_step, t_stop - t)
            if h <= 1e-15 * max(1.0, abs(t)):
                raise NumericsError("step size underflow", time=t)
            for i in range(1, 7):
                yi = y
                for j, aij in enumerate(_DP_A[i]):
                    if aij != 0.0:
                        yi = yi + (h * aij) * k[j]
                k[i] = f(t + _DP_C[i] * h, yi)
            y5 = y
            for i in range(7):
                if _DP_B5[i] != 0.0:
                    y5 = y5 + (h * _DP_B5[i]) * k[i]
            err = np.zeros_like(y)
            for i in range(7):
                if _DP_ERR[i] != 0.0:
                    err = err + (h * _DP_ERR[i]) * k[i]
            scale = atol + rtol * np.maximum(np.abs(y), np.abs(y5))
            enorm = math.sqrt(float(np.mean((np.abs(err) / scale) ** 2)))
            if enorm <= 1.0:
                t = t + h
                y = y5
                k[0] = k[6]  # first-same-as-last; on rejection k[0] stays valid
            factor = 0.9 * enorm**-0.2 if enorm > 0 else 5.0
            h *= min(5.0, max(0.2, factor))
        outputs.append(y.copy())
    return outputs


def _expm_states(liou: sp.csc_matrix, rho0: np.ndarray, t_grid) -> list[np.ndarray]:
    """Propagate a time-independent Liouvillian across the grid via expm."""
    d = rho0.shape[0]
    vec = rho0.reshape(-1)
    t_prev = float(t_grid[0])
    out = [rho0.copy()]
    for t in t_grid[1:]:
        dt = float(t) - t_prev
        if dt > 0:
            vec = spla.expm_multiply(liou * dt, vec)
        out.append(vec.reshape(d, d).copy())
        t_prev = float(t)
    return out


# ---------------------------------------------------------------------------
# Population traces
# ---------------------------------------------------------------------------

@dataclass
class PulseShape:
    """Gaussian drive envelope Omega(t) = peak * exp(-((t - t_peak)/width)^2)."""

    omega_peak: float
    t_peak: float
    width: float  # duration delta-t_p

    def __call__(self, t):
        return self.omega_peak * np.exp(-(((t - self.t_peak) / self.width) ** 2))

    @property
    def power(self) -> float:
        """Pulse power measure: peak amplitude squared times duration."""
        return self.omega_peak**2 * self.width

    @staticmethod
    def from_power(power: float, width: float, t_peak: float | None = None) -> "PulseShape":
        t0 = 3.0 * width if t_peak is None else t_peak
        return PulseShape(math.sqrt(power / width), t0, width)


@dataclass
class PopulationTrace:
    """Projector populations along a propagation.

    ``p_ges`` is the NOON-generating eigenstate population (the N=2 or N=4
    target), ``p_2r`` the remaining population of excitation sectors up to N,
    and ``p_m`` everything above N.
    """

    times: np.ndarray
    p_ges: np.ndarray
    p_1p_plus: np.ndarray
    p_1p_minus: np.ndarray
    p_g00: np.ndarray
    p_2r: np.ndarray
    p_m: np.ndarray
    trace: np.ndarray

    @property
    def p_1photon(self) -> np.ndarray:
        return self.p_1p_plus + self.p_1p_minus


@dataclass
class PropagationResult:
    trace: PopulationTrace
    final: DensityMatrix
    states: list | None = None


def ges_projector_vector(sysm: AssembledSystem) -> np.ndarray:
    """Target-eigenstate vector used for population readout."""
    p = sysm.params
    if isinstance(p, ParamsN2):
        e_minus = p.delta1 - math.sqrt(p.delta1**2 + 2 * p.g2p**2)
        s = -1 if abs(p.delta2 - e_minus / 2) <= abs(p.delta2 - (p.delta1 + math.sqrt(p.delta1**2 + 2 * p.g2p**2)) / 2) else +1
        return ges_vector_n2(sysm.space, p.delta1, p.g2p, s)
    sol = solve_ges_n4(p.ratio, seed=(p.j, p.delta1, p.delta2, p.delta_b))
    if sol is None:
        raise NumericsError("no NOON eigenstate exists at these parameters")
    v = np.zeros(sysm.space.dim, dtype=complex)
    for key, amp in sol.amplitudes.items():
        qd, photons = key.split(",")
        v[sysm.space.index_of(qd, int(photons[0]), int(photons[1]))] = amp
    return v


def _population_readers(sysm: AssembledSystem):
    space = sysm.space
    n = space.model.noon_order
    ges = ges_projector_vector(sysm)
    if sysm.params.j != 0:
        vp, vm = one_photon_vectors(space, sysm.params)
    else:  # decoupled cavities: the bare one-photon states are eigenstates
        vp = space.basis_vector("G", 1, 0)
        vm = space.basis_vector("G", 0, 1)
    ivac = space.vacuum_index()
    ntot = space.total_excitations
    sel_mid = (ntot >= 2) & (ntot <= n)
    sel_above = ntot > n

    def read(rho: np.ndarray):
        pops = np.real(np.diag(rho))
        p_ges = float(np.real(ges.conj() @ rho @ ges))
        return {
            "p_ges": p_ges,
            "p_1p_plus": float(np.real(vp.conj() @ rho @ vp)),
            "p_1p_minus": float(np.real(vm.conj() @ rho @ vm)),
            "p_g00": float(pops[ivac]),
            "p_2r": float(pops[sel_mid].sum() - p_ges),
            "p_m": float(pops[sel_above].sum()),
            "trace": float(pops.sum()),
        }

    return read


def propagate(
    p: Params,
    rho0: DensityMatrix | None = None,
    pulse: PulseShape | None = None,
    t_grid=None,
    n_max: int | None = None,
    rtol: float = 1e-9,
    atol: float = 1e-12,
    method: str = "auto",
    validate: bool = True,
    keep_states: bool = False,
) -> PropagationResult:
    """Integrate the master equation and record projector populations.

    With ``pulse`` the drive amplitude follows the Gaussian envelope (any
    static ``p.rabi`` is ignored); without it the total Hamiltonian is time
    independent and ``method='auto'`` switches to exact Krylov propagation.
    """
    if t_grid is None:
        raise ValueError("t_grid is required")
    t_grid = np.asarray(t_grid, dtype=float)
    sysm = assembled(p, n_max)
    if rho0 is None:
        rho0 = DensityMatrix.vacuum(sysm.space)
    if rho0.space != sysm.space:
        raise ValueError("rho0 lives on a different space than the assembled system")
    if method == "auto":
        method = "rk45" if pulse is not None else "expm"

    if pulse is not None:
        h0 = sysm.h_rot
        pump = sysm.pump_op
        a_ops = sysm.a_ops
        kappa = sysm.kappa

        def rhs(t, rho):
            return lindblad_rhs(h0 + pulse(t) * pump, kappa, a_ops, rho)

        states = integrate_rk45(rhs, t_grid, rho0.mat, rtol=rtol, atol=atol)
    elif method == "rk45":
        h_tot = sysm.h_total()
        a_ops = sysm.a_ops
        kappa = sysm.kappa

        def rhs(_t, rho):
            return lindblad_rhs(h_tot, kappa, a_ops, rho)

        states = integrate_rk45(rhs, t_grid, rho0.mat, rtol=rtol, atol=atol)
    elif method == "expm":
        states = _expm_states(sysm.liouvillian(), rho0.mat, t_grid)
    else:
        raise ValueError(f"unknown method {method!r}")

    read = _population_readers(sysm)
    rows = []
    for t, rho in zip(t_grid, states):
        if validate:
            dm = DensityMatrix(sysm.space, 0.5 * (rho + rho.conj().T))
            try:
                dm.validate()
            except NumericsError as exc:
                raise NumericsError(f"state invalid at t={t}: {exc}", time=float(t)) from exc
        rows.append(read(rho))

    trace = PopulationTrace(
        times=t_grid.copy(),
        **{key: np.array([r[key] for r in rows]) for key in rows[0]},
    )
    final = DensityMatrix(sysm.space, 0.5 * (states[-1] + states[-1].conj().T))
    return PropagationResult(trace=trace, final=final, states=states if keep_states else None)


def pulse_population_map(
    p: Params,
    powers,
    durations,
    n_max: int | None = None,
    rtol: float = 1e-7,
    atol: float = 1e-10,
) -> np.ndarray:
    """GES population just after the pulse over a (power, duration) grid.

    Returns an array of shape (len(powers), len(durations)); the readout time
    is t_peak + 2 * duration.  All powers of one duration are integrated as a
    single batched system (identical time grids).
    """
    powers = np.asarray(powers, dtype=float)
    durations = np.asarray(durations, dtype=float)
    sysm = assembled(p, n_max)
    read_ges = ges_projector_vector(sysm)
    h0, pump, a_ops, kappa = sysm.h_rot, sysm.pump_op, sysm.a_ops, sysm.kappa
    d = sysm.space.dim
    out = np.empty((len(powers), len(durations)))
    for jd, width in enumerate(durations):
        peaks = np.sqrt(powers / width)[:, None, None]
        t_peak = 3.0 * width

        def rhs(t, rho):
            om = peaks * math.exp(-(((t - t_peak) / width) ** 2))
            h = h0[None, :, :] + om * pump[None, :, :]
            return lindblad_rhs_batch(h, kappa, a_ops, rho)

        rho0 = np.zeros((len(powers), d, d), dtype=complex)
        ivac = sysm.space.vacuum_index()
        rho0[:, ivac, ivac] = 1.0
        final = integrate_rk45(rhs, [0.0, t_peak + 2.0 * width], rho0, rtol=rtol, atol=atol)[-1]
        out[:, jd] = np.real(np.einsum("i,bij,j->b", read_ges.conj(), final, read_ges))
    return out


def lindblad_rhs_batch(h_batch: np.ndarray, kappa: float, a_ops, rho: np.ndarray) -> np.ndarray:
    """Master-equation RHS with a per-batch-element Hamiltonian."""
    out = -1j * (h_batch @ rho - rho @ h_batch)
    if kappa != 0.0:
        for a, adag, n in a_ops:
            out += kappa * (a @ rho @ adag - 0.5 * (n @ rho + rho @ n))
    return out


# ---------------------------------------------------------------------------
# Steady states
# ---------------------------------------------------------------------------

def _k_order_permutation(space: HilbertSpace) -> np.ndarray:
    """Vec-basis permutation sorting by bra/ket excitation difference."""
    ntot = space.total_excitations
    d = space.dim
    k = ntot[np.repeat(np.arange(d), d)] - ntot[np.tile(np.arange(d), d)]
    return np.argsort(k, kind="stable"), k


def _trace_constrained(liou: sp.csc_matrix, d: int):
    a = liou.tolil(copy=True)
    trace_row = np.zeros(d * d)
    trace_row[:: d + 1] = 1.0
    a[0, :] = trace_row
    b = np.zeros(d * d, dtype=complex)
    b[0] = 1.0
    return a.tocsc(), b

def steady_state(
    p: Params,
    n_max: int | None = None,
    method: str = "auto",
    residual_tol: float = 1e-10,
) -> DensityMatrix:
    """Unique steady state of the driven-dissipative system.

    ``method='direct'`` solves the trace-constrained linear system with a
    sparse LU on the excitation-difference-ordered Liouvillian;
    ``method='evolve'`` integrates to stationarity with Krylov exponentials.
    """
    if p.kappa <= 0:
        raise ValueError("steady state requires kappa > 0 (dissipation selects it)")
    sysm = assembled(p, n_max)
    if method == "auto":
        method = "direct"
    liou = sysm.liouvillian()
    d = sysm.space.dim
    if method == "direct":
        a, b = _trace_constrained(liou, d)
        perm, _ = _k_order_permutation(sysm.space)
        ap = a[perm][:, perm].tocsc()
        lu = spla.splu(ap, permc_spec="NATURAL")
        xp = lu.solve(b[perm])
        x = np.empty_like(xp)
        x[perm] = xp
        for _ in range(3):  # iterative refinement on the unpermuted system
            r = b - a @ x
            if np.max(np.abs(r)) < 1e-14:
                break
            dxp = lu.solve(r[perm])
            dx = np.empty_like(dxp)
            dx[perm] = dxp
            x = x + dx
        rho = x.reshape(d, d)
    elif method == "evolve":
        rho = _steady_state_by_evolution(liou, sysm, residual_tol)
    else:
        raise ValueError(f"unknown method {method!r}")
    rho = 0.5 * (rho + rho.conj().T)
    rho /= np.trace(rho).real
    residual = float(np.max(np.abs(liou @ rho.reshape(-1))))
    if residual > residual_tol:
        raise NumericsError(
            f"steady-state residual {residual:.3e} above {residual_tol:.0e}",
            residual=residual,
        )
    return DensityMatrix(sysm.space, rho)


def _steady_state_by_evolution(liou, sysm, residual_tol, max_time: float = 1e7):
    rho = DensityMatrix.vacuum(sysm.space).mat
    vec = rho.reshape(-1)
    # relaxation is set by the slowest decay channel; march in growing spans
    dt = 10.0 / max(sysm.kappa, 1e-6)
    t_acc = 0.0
    while t_acc < max_time:
        vec = spla.expm_multiply(liou * dt, vec)
        t_acc += dt
        residual = float(np.max(np.abs(liou @ vec)))
        if residual < residual_tol:
            d = sysm.space.dim
            return vec.reshape(d, d)
        dt = min(dt * 2.0, max_time / 4)
    raise NumericsError(
        f"steady state not reached by evolution (residual {residual:.3e})",
        residual=residual,
    )


def steady_state_diagonal_sector(
    p: Params, n_max: int | None = None, residual_tol: float = 1e-10
) -> DensityMatrix:
    """Equal-excitation part of the steady state via block elimination.

    The returned matrix keeps only coherences between states of equal total
    excitation (which carry every photon-number-conserving moment, hence all
    tomography observables); it is Hermitian, unit-trace and positive.  Much
    cheaper than the full solve for large two-dot spaces.
    """
    if p.kappa <= 0:
        raise ValueError("steady state requires kappa > 0")
    sysm = assembled(p, n_max)
    d = sysm.space.dim
    liou = sysm.liouvillian()
    a, b = _trace_constrained(liou, d)
    perm, kvals = _k_order_permutation(sysm.space)
    ap = a[perm][:, perm].tocsr()
    bp = b[perm]
    ks = kvals[perm]
    uniq = np.unique(ks)
    slices = {int(k): slice(*np.searchsorted(ks, [k, k + 0.5])) for k in uniq}

    def block(k_row: int, k_col: int) -> np.ndarray:
        return ap[slices[k_row], slices[k_col]].toarray()

    k_min, k_max = int(uniq[0]), int(uniq[-1])
    # fold lower blocks upward onto k=0 and upper blocks downward; only the
    # last two factors per side are kept (for the residual canary)
    factors: dict[int, tuple] = {}
    for k in range(k_min, 0):
        s = block(k, k)
        if k > k_min:
            prev = factors[k - 1]
            s = s - block(k, k - 1) @ sla.lu_solve(prev, block(k - 1, k))
        factors[k] = sla.lu_factor(s)
        factors.pop(k - 2, None)
    for k in range(k_max, 0, -1):
        s = block(k, k)
        if k < k_max:
            prev = factors[k + 1]
            s = s - block(k, k + 1) @ sla.lu_solve(prev, block(k + 1, k))
        factors[k] = sla.lu_factor(s)
        factors.pop(k + 2, None)
    s0 = block(0, 0)
    if -1 in factors:
        s0 = s0 - block(0, -1) @ sla.lu_solve(factors[-1], block(-1, 0))
    if 1 in factors:
        s0 = s0 - block(0, 1) @ sla.lu_solve(factors[1], block(1, 0))
    x0 = sla.solve(s0, bp[slices[0]])

    # canary residual on the adjacent off-sector rows
    x_side = {}
    for k in (-1, 1):
        if k in factors:
            x_side[k] = -sla.lu_solve(factors[k], block(k, 0) @ x0)
    for k, xk in x_side.items():
        r = block(k, k) @ xk + block(k, 0) @ x0
        k2 = k + ((-1) if k < 0 else 1)
        if k2 in factors:
            xk2 = -sla.lu_solve(factors[k2], block(k2, k) @ xk)
            r = r + block(k, k2) @ xk2
        if np.max(np.abs(r)) > 1e3 * residual_tol:
            raise NumericsError(
                f"block elimination residual {np.max(np.abs(r)):.3e}",
                residual=float(np.max(np.abs(r))),
            )

    x = np.zeros(d * d, dtype=complex)
    sector_positions = perm[slices[0]]
    x[sector_positions] = x0
    rho = x.reshape(d, d)
    rho = 0.5 * (rho + rho.conj().T)
    rho /= np.trace(rho).real
    return DensityMatrix(sysm.space, rho)


# ---------------------------------------------------------------------------
# Truncation convergence
# ---------------------------------------------------------------------------

@dataclass
class ConvergenceReport:
    n_max_values: tuple
    values: tuple
    max_successive_diff: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_successive_diff < self.tol


def convergence_check(p: Params, n_max_list, quantity, tol: float = 1e-4) -> ConvergenceReport:
    """Re-evaluate ``quantity(p, n_max)`` across truncations.

    Passes when successive values differ by less than ``tol``.
    """
    n_list = tuple(int(n) for n in n_max_list)
    if len(n_list) < 2:
        raise ValueError("need at least two truncations to compare")
    values = tuple(float(quantity(p, n)) for n in n_list)
    diffs = [abs(b - a) for a, b in zip(values, values[1:])]
    return ConvergenceReport(
        n_max_values=n_list,
        values=values,
        max_successive_diff=max(diffs),
        tol=tol,
    )
