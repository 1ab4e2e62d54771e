"""Transition probabilities between complete families, and their unitary form.

If an observer holds the maximal answer for one family and then asks the
atoms of another, the outcome probabilities form a matrix that is doubly
stochastic (rows and columns sum to one) and, for Hilbert-space families,
arises as the squared moduli of a unitary change of basis: p = |U|^2.
Kernels compose through their unitaries, U_ac = U_ab U_bc, never through
their probability matrices -- the mismatch between |U_ab U_bc|^2 and
p_ab p_bc is exactly quantum interference, which the composite-question
probabilities below quantify.

Not every doubly stochastic matrix is unistochastic for size >= 3.
:func:`unistochastic_search` decides feasibility numerically by multi-start
projection onto the unitary manifold; for 3x3 matrices the analytic
chain-links criterion (:func:`triangle_criterion_3x3`) provides an
independent certificate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    FamilyMismatch,
    IndexOutOfRange,
    MissingUnitary,
    NotDoublyStochastic,
)
from .hilbert import ATOL, OPT_ATOL
from .questions import CompleteFamily

__all__ = [
    "TransitionKernel",
    "StochasticReport",
    "UnistochasticResult",
    "kernel_from_families",
    "verify_double_stochastic",
    "composite_probability",
    "classical_composite_probability",
    "interference_gap",
    "compose",
    "unistochastic_search",
    "triangle_criterion_3x3",
    "phase_fix",
]


@dataclass(frozen=True, eq=False)
class TransitionKernel:
    """Outcome probabilities p[i, j] of to-family atom i given from-family atom j.

    The unitary realizing p = |U|^2 is cached alongside; operations that need
    phases refuse kernels without one instead of re-deriving phases silently.
    """

    p: np.ndarray
    to_family: str
    from_family: str
    U: np.ndarray | None = None

    def __post_init__(self):
        p = np.array(self.p, dtype=float)
        if p.ndim != 2 or p.shape[0] != p.shape[1]:
            raise ValueError(f"kernel matrix must be square, got {p.shape}")
        report = verify_double_stochastic(p)
        if not report.ok(ATOL):
            raise ValueError(f"kernel is not doubly stochastic: {report}")
        p.setflags(write=False)
        object.__setattr__(self, "p", p)
        if self.U is not None:
            u = np.array(self.U, dtype=complex)
            if np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) > ATOL:
                raise ValueError("kernel unitary is not unitary")
            if np.max(np.abs(np.abs(u) ** 2 - p)) > ATOL:
                raise ValueError("kernel unitary does not reproduce p = |U|^2")
            u.setflags(write=False)
            object.__setattr__(self, "U", u)

    @property
    def dim(self) -> int:
        return self.p.shape[0]

    def __repr__(self):
        return (f"TransitionKernel({self.to_family!r} <- {self.from_family!r}, "
                f"dim={self.dim}, has_unitary={self.U is not None})")


@dataclass(frozen=True)
class StochasticReport:
    """Worst-case violations of the doubly stochastic constraints."""

    range_violation: float
    row_sum_violation: float
    column_sum_violation: float

    @property
    def max_violation(self) -> float:
        return max(self.range_violation, self.row_sum_violation,
                   self.column_sum_violation)

    def ok(self, tol: float = ATOL) -> bool:
        return self.max_violation <= tol

    def __str__(self):
        return (f"range {self.range_violation:.3g}, rows {self.row_sum_violation:.3g}, "
                f"columns {self.column_sum_violation:.3g}")


def verify_double_stochastic(p) -> StochasticReport:
    """Report how far a matrix is from doubly stochastic (diagnostic, no raise)."""
    p = np.asarray(p, dtype=float)
    range_violation = max(float(np.max(-p, initial=0.0)),
                          float(np.max(p - 1.0, initial=0.0)), 0.0) + 0.0
    row = float(np.max(np.abs(p.sum(axis=1) - 1.0)))
    col = float(np.max(np.abs(p.sum(axis=0) - 1.0)))
    return StochasticReport(range_violation, row, col)


def kernel_from_families(b: CompleteFamily, c: CompleteFamily) -> TransitionKernel:
    """Kernel for measuring family b given maximal information in family c.

    U = B†C is the change-of-basis matrix, so U[i, j] = <b_i|c_j> and
    p[i, j] = |<b_i|c_j>|^2.
    """
    if b.dim != c.dim:
        raise DimensionMismatch(f"family dims differ: {b.dim} vs {c.dim}")
    u = b.basis.conj().T @ c.basis
    return TransitionKernel(np.abs(u) ** 2, to_family=b.label,
                            from_family=c.label, U=u)


def _unitary_of(kernel_or_u) -> np.ndarray:
    if isinstance(kernel_or_u, TransitionKernel):
        if kernel_or_u.U is None:
            raise MissingUnitary(
                "this kernel carries probabilities only; composite probabilities "
                "need the transition amplitudes")
        return kernel_or_u.U
    return np.asarray(kernel_or_u, dtype=complex)


def _probabilities_of(kernel_or_p) -> np.ndarray:
    if isinstance(kernel_or_p, TransitionKernel):
        return kernel_or_p.p
    return np.asarray(kernel_or_p, dtype=float)


def _check_indices(dim: int, i: int, jk: tuple[int, int]) -> tuple[int, int]:
    j, k = jk
    for name, idx in (("i", i), ("j", j), ("k", k)):
        if not 0 <= idx < dim:
            raise IndexOutOfRange(f"index {name}={idx} outside [0, {dim})")
    if j == k:
        raise IndexOutOfRange("composite question needs two distinct atoms")
    return j, k


def composite_probability(kernel_or_u, i: int, jk: tuple[int, int]) -> float:
    """Probability of yes-to-atom-i after yes-to-atom-i then yes to the
    composite question "atom j or atom k" of the other family.

    Coherent two-leg chain: each closed loop i -> m -> i contributes the
    forward amplitude U[i, m] times the reverse amplitude (the conjugate,
    since the reverse kernel carries U†), and the legs through j and k add
    before squaring.  Equals the projective-sequence value
    ``|| P_i (P_j + P_k) |b_i> ||^2``.
    """
    u = _unitary_of(kernel_or_u)
    j, k = _check_indices(u.shape[0], i, jk)
    amplitude = u[i, j] * np.conj(u[i, j]) + u[i, k] * np.conj(u[i, k])
    return float(np.abs(amplitude) ** 2)


def classical_composite_probability(kernel_or_p, i: int, jk: tuple[int, int]) -> float:
    """Incoherent value of the same chain: (p[i,j])^2 + (p[i,k])^2.

    What the composite probability would be if the two exclusive alternatives
    contributed independently; the difference from
    :func:`composite_probability` is the interference term.
    """
    p = _probabilities_of(kernel_or_p)
    j, k = _check_indices(p.shape[0], i, jk)
    return float(p[i, j] ** 2 + p[i, k] ** 2)


def interference_gap(kernel_or_u, i: int, jk: tuple[int, int]) -> float:
    """Composite minus classical probability; zero for permutation kernels."""
    u = _unitary_of(kernel_or_u)
    return composite_probability(u, i, jk) - classical_composite_probability(
        np.abs(u) ** 2, i, jk)


def compose(k1: TransitionKernel, k2: TransitionKernel) -> TransitionKernel:
    """Chain two kernels through their shared middle family: U_ac = U_ab U_bc.

    The probability matrix of the result is |U_ab U_bc|^2, which differs from
    the product p_ab p_bc whenever interference is present.
    """
    if k1.U is None or k2.U is None:
        raise MissingUnitary("composition needs both kernels to carry unitaries")
    if k1.from_family != k2.to_family:
        raise FamilyMismatch(
            f"no shared middle family: {k1.from_family!r} vs {k2.to_family!r}")
    u = k1.U @ k2.U
    return TransitionKernel(np.abs(u) ** 2, to_family=k1.to_family,
                            from_family=k2.from_family, U=u)


def phase_fix(u) -> np.ndarray:
    """Canonical gauge: first row and first column made real nonnegative.

    Row/column phase multiplications leave |U|^2 untouched, so this fixes the
    freedom left by a probability matrix without changing any prediction.
    """
    u = np.array(u, dtype=complex)
    for j in range(u.shape[1]):
        a = u[0, j]
        if abs(a) > 1e-12:
            u[:, j] *= np.conj(a) / abs(a)
    for i in range(1, u.shape[0]):
        a = u[i, 0]
        if abs(a) > 1e-12:
            u[i, :] *= np.conj(a) / abs(a)
    # columns with a vanishing first-row entry keep a free phase; anchor them
    # on their first nonzero entry (cannot disturb the first row or column)
    for j in range(u.shape[1]):
        if abs(u[0, j]) > 1e-12:
            continue
        nonzero = np.flatnonzero(np.abs(u[:, j]) > 1e-12)
        if nonzero.size:
            a = u[nonzero[0], j]
            u[:, j] *= np.conj(a) / abs(a)
    return u


@dataclass(frozen=True)
class UnistochasticResult:
    """Best unitary found, its residual, and each start's best residual."""

    U: np.ndarray
    residual: float
    start_residuals: np.ndarray
    iterations: int

    def accepted(self, tol: float = OPT_ATOL) -> bool:
        """The matrix is certified unistochastic at this tolerance."""
        return self.residual < tol

    def all_stalled(self, threshold: float = 1e-2) -> bool:
        """Every start stayed far from feasibility: declare non-unistochastic."""
        return bool(np.min(self.start_residuals) > threshold)

    @property
    def verdict(self) -> str:
        if self.accepted():
            return "unistochastic"
        if self.all_stalled():
            return "non-unistochastic"
        return "inconclusive"


def _project_unitary(a: np.ndarray) -> np.ndarray:
    w, _, vh = np.linalg.svd(a)
    return w @ vh


def _project_modulus(a: np.ndarray, root: np.ndarray) -> np.ndarray:
    mag = np.abs(a)
    phase = np.where(mag > 1e-15, a / np.where(mag > 1e-15, mag, 1.0), 1.0)
    return root * phase


def _hermitian_basis(dim: int) -> np.ndarray:
    basis = []
    for i in range(dim):
        e = np.zeros((dim, dim), dtype=complex)
        e[i, i] = 1.0
        basis.append(e)
    for i in range(dim):
        for j in range(i + 1, dim):
            e = np.zeros((dim, dim), dtype=complex)
            e[i, j] = e[j, i] = 1 / np.sqrt(2)
            basis.append(e)
            e = np.zeros((dim, dim), dtype=complex)
            e[i, j] = -1j / np.sqrt(2)
            e[j, i] = 1j / np.sqrt(2)
            basis.append(e)
    return np.array(basis)


def _gauss_newton_polish(u: np.ndarray, p: np.ndarray, iters: int = 40,
                         stop: float = 1e-13) -> tuple[np.ndarray, float]:
    """Local refinement on the unitary manifold.

    Levenberg-damped Gauss-Newton in the tangent coordinates U -> e^{-iH} U;
    quadratically convergent where the projection iteration only crawls.
    """
    dim = p.shape[0]
    basis = _hermitian_basis(dim)
    n_par = len(basis)
    resid = (np.abs(u) ** 2 - p).ravel()
    f = float(np.linalg.norm(resid))
    lam = 1e-8
    for _ in range(iters):
        if f < stop:
            break
        jac = np.empty((dim * dim, n_par))
        for a in range(n_par):
            du = -1j * (basis[a] @ u)
            jac[:, a] = (2 * np.real(np.conj(u) * du)).ravel()
        improved = False
        for _attempt in range(8):
            step = np.linalg.solve(jac.T @ jac + lam * np.eye(n_par), -jac.T @ resid)
            h = np.tensordot(step, basis, axes=(0, 0))
            w, v = np.linalg.eigh(h)
            u_new = (v * np.exp(-1j * w)) @ v.conj().T @ u
            resid_new = (np.abs(u_new) ** 2 - p).ravel()
            f_new = float(np.linalg.norm(resid_new))
            if f_new < f:
                u, resid, f = u_new, resid_new, f_new
                lam = max(lam * 0.3, 1e-12)
                improved = True
                break
            lam *= 10
        if not improved:
            break
    return u, f


def unistochastic_search(p, seed: int = 0, n_starts: int = 64,
                         max_iters: int = 500) -> UnistochasticResult:
    """Search for a unitary with |U|^2 = p by multi-start projections.

    Each start runs reflection-averaged alternating projections
    (Douglas-Rachford) between the unitary manifold -- reached by polar
    decomposition via the SVD -- and the fixed-modulus set sqrt(p) * phases,
    from seeded random phases (start 0 uses zero phases).  The most promising
    starts get a Gauss-Newton polish.  Starts are independent and merged by
    minimum residual with a deterministic tie-break (lowest start index).

    A residual below 1e-6 certifies p as unistochastic; non-unistochasticity
    is declared only when every start stalls above 1e-2.
    """
    p = np.asarray(p, dtype=float)
    report = verify_double_stochastic(p)
    if not report.ok(OPT_ATOL):
        raise NotDoublyStochastic(f"input violates double stochasticity: {report}")
    dim = p.shape[0]
    root = np.sqrt(np.maximum(p, 0.0))
    stop = 1e-12

    rng = np.random.default_rng(seed)
    theta = rng.uniform(0.0, 2 * np.pi, size=(n_starts, dim, dim))
    theta[0] = 0.0
    z = root[None, :, :] * np.exp(1j * theta)
    best_res = np.full(n_starts, np.inf)
    best_u = np.zeros_like(z)
    iterations = 0
    for iterations in range(1, max_iters + 1):
        u = _project_unitary(z)
        res = np.linalg.norm(np.abs(u) ** 2 - p[None], axis=(1, 2))
        mask = res < best_res
        best_res[mask] = res[mask]
        best_u[mask] = u[mask]
        if best_res.min() < stop:
            break
        reflected = _project_modulus(2 * u - z, root[None])
        z = z + reflected - u

    if best_res.min() >= stop:
        for b in np.argsort(best_res, kind="stable")[:3]:
            if best_res[b] >= 1e-2:
                continue
            u_polished, f = _gauss_newton_polish(best_u[b], p)
            if f < best_res[b]:
                best_u[b] = u_polished
                best_res[b] = f
            if best_res[b] < stop:
                break

    b = int(np.argmin(best_res))
    return UnistochasticResult(U=best_u[b], residual=float(best_res[b]),
                               start_residuals=best_res, iterations=iterations)


def triangle_criterion_3x3(p, tol: float = ATOL) -> bool:
    """Analytic unistochasticity test for 3x3 doubly stochastic matrices.

    Row orthogonality of a unitary forces the three link moduli
    L_m = sqrt(p[a, m] p[b, m]) of any row pair (a, b) to close into a
    triangle; for 3x3 matrices this chain-links condition is also
    sufficient.  All row and column pairs are checked.
    """
    p = np.asarray(p, dtype=float)
    if p.shape != (3, 3):
        raise DimensionMismatch(f"criterion is specific to 3x3, got {p.shape}")
    report = verify_double_stochastic(p)
    if not report.ok(OPT_ATOL):
        raise NotDoublyStochastic(f"input violates double stochasticity: {report}")

    def links_close(links: np.ndarray) -> bool:
        total = float(links.sum())
        return bool(np.max(links) <= total - np.max(links) + tol)

    for a in range(3):
        for b in range(a + 1, 3):
            if not links_close(np.sqrt(p[a, :] * p[b, :])):
                return False
            if not links_close(np.sqrt(p[:, a] * p[:, b])):
                return False
    return True
