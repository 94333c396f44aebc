"""Exact dense complex linear algebra for small quantum systems.

States, operators and measurements are thin immutable wrappers around
``numpy`` arrays, validated on construction.  The eigensolver is a cyclic
Jacobi iteration: slower than LAPACK but bit-deterministic for identical
input, which keeps optimal encodings reproducible across platforms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .tolerances import TOL

_MAX_JACOBI_SWEEPS = 60


def _as_square_matrix(value, name: str = "matrix") -> np.ndarray:
    m = np.asarray(value, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {m.shape}")
    return m


def _hermiticity_defect(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized state vector with a fixed global phase.

    The phase convention makes the first component of modulus above
    ``TOL.phase_pivot`` real and nonnegative, so equal rays compare equal
    entrywise.
    """

    amplitudes: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.amplitudes, dtype=complex)
        if v.ndim != 1 or v.size == 0:
            raise ValueError("amplitudes must be a nonempty 1-d vector")
        norm_sq = float(np.sum(np.abs(v) ** 2))
        if abs(norm_sq - 1.0) > TOL.norm:
            raise ValueError(f"state is not normalized: |norm^2 - 1| = {abs(norm_sq - 1.0):.3e}")
        v = v / np.sqrt(norm_sq)
        pivots = np.flatnonzero(np.abs(v) > TOL.phase_pivot)
        pivot = v[pivots[0]]
        v = v * (pivot.conjugate() / abs(pivot))
        object.__setattr__(self, "amplitudes", _frozen(v))

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def inner(self, other: "PureState") -> complex:
        if other.dim != self.dim:
            raise ValueError("dimension mismatch in inner product")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def projector(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian positive semidefinite operator of unit trace."""

    matrix: np.ndarray

    def __post_init__(self):
        m = _as_square_matrix(self.matrix, "density matrix")
        defect = _hermiticity_defect(m)
        if defect > TOL.hermitian:
            raise ValueError(f"density matrix is not Hermitian: deviation {defect:.3e}")
        trace = complex(np.trace(m))
        if abs(trace - 1.0) > TOL.trace:
            raise ValueError(f"density matrix trace {trace:.12g} is not 1")
        low = min(hermitian_eig(m).eigenvalues)
        if low < -TOL.psd:
            raise ValueError(f"density matrix has negative eigenvalue {low:.3e}")
        object.__setattr__(self, "matrix", _frozen(m.copy()))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def from_pure(cls, state: PureState) -> "DensityMatrix":
        return cls(state.projector())


@dataclass(frozen=True, eq=False)
class Effect:
    """Measurement effect: Hermitian with spectrum inside [0, 1]."""

    matrix: np.ndarray

    def __post_init__(self):
        m = _as_square_matrix(self.matrix, "effect")
        defect = _hermiticity_defect(m)
        if defect > TOL.hermitian:
            raise ValueError(f"effect is not Hermitian: deviation {defect:.3e}")
        eigs = hermitian_eig(m).eigenvalues
        if eigs[0] < -TOL.psd or eigs[-1] > 1.0 + TOL.effect_upper:
            raise ValueError(f"effect spectrum [{eigs[0]:.3e}, {eigs[-1]:.12g}] leaves [0, 1]")
        object.__setattr__(self, "matrix", _frozen(m.copy()))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True, eq=False)
class Povm:
    """Ordered collection of effects resolving the identity."""

    effects: tuple

    def __post_init__(self):
        effects = tuple(e if isinstance(e, Effect) else Effect(e) for e in self.effects)
        if len(effects) < 2:
            raise ValueError("a POVM needs at least two outcomes")
        dim = effects[0].dim
        if any(e.dim != dim for e in effects):
            raise ValueError("all effects must share one dimension")
        total = sum(e.matrix for e in effects)
        if np.max(np.abs(total - np.eye(dim))) > TOL.completeness:
            raise ValueError("effects do not resolve the identity")
        object.__setattr__(self, "effects", effects)

    @property
    def dim(self) -> int:
        return self.effects[0].dim

    @property
    def outcomes(self) -> int:
        return len(self.effects)

    def __getitem__(self, outcome: int) -> Effect:
        return self.effects[outcome]


@dataclass(frozen=True, eq=False)
class Basis:
    """Orthonormal basis given as a tuple of pure states."""

    vectors: tuple

    def __post_init__(self):
        vecs = tuple(v if isinstance(v, PureState) else PureState(np.asarray(v)) for v in self.vectors)
        dim = vecs[0].dim
        if len(vecs) != dim or any(v.dim != dim for v in vecs):
            raise ValueError("a basis needs exactly dim vectors of matching dimension")
        stack = np.stack([v.amplitudes for v in vecs])
        gram = stack @ stack.conj().T
        off = np.max(np.abs(gram - np.eye(dim)))
        if off > TOL.orthonormal:
            raise ValueError(f"basis is not orthonormal: overlap defect {off:.3e}")
        object.__setattr__(self, "vectors", vecs)

    @property
    def dim(self) -> int:
        return self.vectors[0].dim

    def __getitem__(self, index: int) -> PureState:
        return self.vectors[index]

    def to_povm(self) -> Povm:
        return Povm(tuple(Effect(v.projector()) for v in self.vectors))


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigenvalues in ascending order with matching orthonormal eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: tuple

    def __post_init__(self):
        w = np.array(self.eigenvalues, dtype=float)
        vecs = tuple(self.eigenvectors)
        if w.ndim != 1 or len(vecs) != w.size:
            raise ValueError("eigenvalue/eigenvector count mismatch")
        if np.any(np.diff(w) < -TOL.cluster_gap):
            raise ValueError("eigenvalues are not ascending")
        stack = np.stack([v.amplitudes for v in vecs])
        if np.max(np.abs(stack @ stack.conj().T - np.eye(w.size))) > TOL.orthonormal:
            raise ValueError("eigenvectors are not orthonormal")
        object.__setattr__(self, "eigenvalues", _frozen(w))
        object.__setattr__(self, "eigenvectors", vecs)

    @property
    def max_eigenvalue(self) -> float:
        return float(self.eigenvalues[-1])

    def top_eigenvector(self) -> PureState:
        """First eigenvector (in the deterministic tie-break order) of the
        maximal-eigenvalue cluster."""
        w = self.eigenvalues
        start = w.size - 1
        while start > 0 and w[start] - w[start - 1] < TOL.cluster_gap:
            start -= 1
        return self.eigenvectors[start]


def _tiebreak_key(v: np.ndarray) -> tuple:
    rounded = np.round(v, TOL.tiebreak_decimals) + 0.0  # normalize -0.0
    return tuple(float(x) for pair in zip(rounded.real, rounded.imag) for x in pair)


def _jacobi_eigh(matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi diagonalization of a Hermitian matrix.

    Returns unsorted eigenvalues (real diagonal) and the accumulated unitary,
    converged when the off-diagonal Frobenius norm drops below
    ``TOL.jacobi_off``.  Scalar arithmetic on nested lists: at these
    dimensions that is faster than vectorized updates and identical on every
    platform.
    """
    d = matrix.shape[0]
    a = [[complex(matrix[i, j]) for j in range(d)] for i in range(d)]
    v = [[1.0 + 0.0j if i == j else 0.0j for j in range(d)] for i in range(d)]
    if d == 1:
        return np.array([a[0][0].real]), np.eye(1, dtype=complex)
    skip = TOL.jacobi_off / (2.0 * d)
    indices = range(d)
    for _ in range(_MAX_JACOBI_SWEEPS):
        off_sq = 0.0
        for i in indices:
            row = a[i]
            for j in indices:
                if i != j:
                    x = row[j]
                    off_sq += x.real * x.real + x.imag * x.imag
        if math.sqrt(off_sq) < TOL.jacobi_off:
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                g = a[p][q]
                absg = abs(g)
                if absg <= skip:
                    continue
                alpha = a[p][p].real
                beta = a[q][q].real
                phase = g / absg
                tau = (beta - alpha) / (2.0 * absg)
                t = (1.0 if tau >= 0.0 else -1.0) / (abs(tau) + math.hypot(1.0, tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                sp = s * phase
                spc = sp.conjugate()
                for i in indices:
                    row = a[i]
                    xp = row[p]
                    xq = row[q]
                    row[p] = c * xp - spc * xq
                    row[q] = sp * xp + c * xq
                row_p = a[p]
                row_q = a[q]
                for j in indices:
                    xp = row_p[j]
                    xq = row_q[j]
                    row_p[j] = c * xp - sp * xq
                    row_q[j] = spc * xp + c * xq
                row_p[q] = 0.0j
                row_q[p] = 0.0j
                row_p[p] = complex(row_p[p].real)
                row_q[q] = complex(row_q[q].real)
                for i in indices:
                    row = v[i]
                    xp = row[p]
                    xq = row[q]
                    row[p] = c * xp - spc * xq
                    row[q] = sp * xp + c * xq
    else:
        raise RuntimeError("Jacobi iteration failed to converge")
    eigenvalues = np.array([a[i][i].real for i in indices])
    return eigenvalues, np.array(v, dtype=complex)


def hermitian_eig(h) -> Spectrum:
    """Deterministic eigendecomposition of a Hermitian matrix.

    Eigenvalues come out ascending; within a degenerate cluster (consecutive
    gaps below ``TOL.cluster_gap``) eigenvectors are ordered by lexicographic
    comparison of their rounded, phase-fixed amplitude tuples.
    """
    m = _as_square_matrix(h, "input")
    d = m.shape[0]
    if d > TOL.dim_cap:
        raise ValueError(f"dimension {d} exceeds the exact-solver cap {TOL.dim_cap}")
    defect = _hermiticity_defect(m)
    if defect > TOL.hermitian:
        raise ValueError(
            f"matrix is not Hermitian: max |H - H^dag| = {defect:.3e} exceeds {TOL.hermitian:.1e}"
        )
    m = (m + m.conj().T) / 2.0
    w, v = _jacobi_eigh(m)
    if np.max(np.abs((v * w) @ v.conj().T - m)) > TOL.reconstruction:
        raise RuntimeError("eigendecomposition failed the reconstruction check")
    order = np.argsort(w, kind="stable")
    w = w[order]
    states = [PureState(v[:, i]) for i in order]

    sorted_states: list[PureState] = []
    i = 0
    while i < d:
        j = i + 1
        while j < d and w[j] - w[j - 1] < TOL.cluster_gap:
            j += 1
        if j - i == 1:
            sorted_states.append(states[i])
        else:
            cluster = sorted(
                range(i, j), key=lambda k: _tiebreak_key(states[k].amplitudes)
            )
            sorted_states.extend(states[k] for k in cluster)
            w[i:j] = w[np.array(cluster)]
        i = j
    return Spectrum(w, tuple(sorted_states))


def operator_norm(h) -> float:
    """Operator norm of a Hermitian positive semidefinite matrix."""
    spectrum = hermitian_eig(h)
    low = float(spectrum.eigenvalues[0])
    if low < -TOL.psd:
        raise ValueError(f"matrix is not positive semidefinite: min eigenvalue {low:.3e}")
    return max(spectrum.max_eigenvalue, 0.0)


def tensor(a, b):
    """Tensor product of two states or two operators, big-endian.

    The left factor is the most significant digit: component ``I`` of a
    product state carries the base-d digits of ``I`` left to right.  Mixing a
    state with an operator is rejected.
    """
    a_state = isinstance(a, PureState)
    b_state = isinstance(b, PureState)
    if a_state and b_state:
        return PureState(np.kron(a.amplitudes, b.amplitudes))
    if a_state or b_state:
        raise TypeError("cannot tensor a state with an operator")
    return np.kron(_as_square_matrix(a, "left factor"), _as_square_matrix(b, "right factor"))


def partial_trace(operator, dims: tuple[int, int], keep: int) -> np.ndarray:
    """Trace out one tensor factor of an operator on a bipartite space.

    ``dims`` is ``(d1, d2)`` with the first factor most significant;
    ``keep`` is 1 or 2 and names the subsystem that survives.
    """
    m = _as_square_matrix(operator, "operator")
    d1, d2 = dims
    if d1 < 1 or d2 < 1 or d1 * d2 != m.shape[0]:
        raise ValueError(f"dims {dims} do not factor dimension {m.shape[0]}")
    if keep not in (1, 2):
        raise ValueError("keep must be 1 or 2")
    t = m.reshape(d1, d2, d1, d2)
    if keep == 1:
        return np.trace(t, axis1=1, axis2=3)
    return np.trace(t, axis1=0, axis2=2)


def born_probability(state, effect) -> float:
    """Born-rule probability of one effect on a pure state or density matrix."""
    e = effect.matrix if isinstance(effect, Effect) else _as_square_matrix(effect, "effect")
    if isinstance(state, PureState):
        if state.dim != e.shape[0]:
            raise ValueError("state and effect dimensions differ")
        value = float(np.real(np.vdot(state.amplitudes, e @ state.amplitudes)))
    elif isinstance(state, DensityMatrix):
        if state.dim != e.shape[0]:
            raise ValueError("state and effect dimensions differ")
        value = float(np.real(np.trace(state.matrix @ e)))
    else:
        raise TypeError("state must be a PureState or DensityMatrix")
    if value < -TOL.probability_slack or value > 1.0 + TOL.probability_slack:
        raise ValueError(f"Born probability {value:.12g} is outside [0, 1] beyond tolerance")
    return min(max(value, 0.0), 1.0)
