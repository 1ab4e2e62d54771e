"""Heisenberg-picture dynamics: questions evolve, states can too.

Time evolution is a symmetry of the question lattice, so the questions at
two times are related by conjugation with a unitary propagator
U(t) = exp(-i t H) generated by a self-adjoint Hamiltonian (hbar = 1).
The propagators form an abelian one-parameter group.  Conjugation preserves
ranks, spectra and all lattice relations; moving the evolution onto states
instead (the Schrodinger picture) predicts identical probabilities.

The exponential is computed by hermitian eigendecomposition, which keeps
the propagator unitary to machine precision at the small dimensions used
here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NotHermitian
from .hilbert import ATOL, Operator, StateVector, apply
from .questions import Question

__all__ = ["Propagator", "propagator", "heisenberg_evolve", "schrodinger_evolve"]


@dataclass(frozen=True, eq=False)
class Propagator:
    """A Hamiltonian, a duration, and the unitary exp(-i t H) they generate."""

    hamiltonian: Operator
    t: float
    unitary: Operator

    @property
    def dim(self) -> int:
        return self.unitary.dim


def propagator(h: Operator, t: float) -> Propagator:
    """Build exp(-i t H) from a hermitian H via eigendecomposition."""
    if not h.is_hermitian:
        raise NotHermitian("propagator needs a hermitian Hamiltonian")
    w, v = np.linalg.eigh(h.matrix)
    u = (v * np.exp(-1j * t * w)) @ v.conj().T
    op = Operator(u, h.dim_factors)
    if not op.is_unitary:
        raise ValueError(f"propagator drifted from unitarity beyond {ATOL}")
    return Propagator(h, float(t), op)


def heisenberg_evolve(q: Question, prop: Propagator) -> Question:
    """Conjugate a question: its subspace basis is mapped by the propagator.

    Rank is preserved, and so is every lattice relation among a family of
    questions -- evolution is an isomorphism of the question lattice.
    """
    if q.ambient_dim != prop.dim:
        raise DimensionMismatch(
            f"question dim {q.ambient_dim} vs propagator dim {prop.dim}")
    return Question(prop.unitary.matrix @ q.basis)


def schrodinger_evolve(s: StateVector, prop: Propagator) -> StateVector:
    """Evolve the state instead of the question.

    Dual to :func:`heisenberg_evolve`: the Born probability of an evolved
    question on a fixed state equals that of the fixed question on the
    inverse-evolved state.
    """
    if s.dim != prop.dim:
        raise DimensionMismatch(f"state dim {s.dim} vs propagator dim {prop.dim}")
    return apply(prop.unitary, s)
