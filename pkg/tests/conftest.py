"""Shared helpers for building random states and measurements."""

from __future__ import annotations

import numpy as np
import pytest

from qracsim import Effect, MeasurementPair, Povm


def haar_unitary(rng: np.random.Generator, d: int) -> np.ndarray:
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(g)
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def random_hermitian(rng: np.random.Generator, d: int) -> np.ndarray:
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (g + g.conj().T) / 2.0


def random_pvm(rng: np.random.Generator, d: int) -> Povm:
    u = haar_unitary(rng, d)
    return Povm(tuple(Effect(np.outer(u[:, k], u[:, k].conj())) for k in range(d)))


def random_povm(rng: np.random.Generator, d: int) -> Povm:
    """d-outcome POVM from normalized random positive operators."""
    blocks = [rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)) for _ in range(d)]
    raw = [b @ b.conj().T for b in blocks]
    total = sum(raw)
    w, v = np.linalg.eigh(total)
    inv_sqrt = v @ np.diag(1.0 / np.sqrt(w)) @ v.conj().T
    return Povm(tuple(Effect(inv_sqrt @ e @ inv_sqrt) for e in raw))


def smeared_pvm(rng: np.random.Generator, d: int) -> Povm:
    """Projective measurement mixed with white noise, still d outcomes."""
    lam = rng.uniform(0.2, 0.95)
    u = haar_unitary(rng, d)
    eye = np.eye(d)
    return Povm(
        tuple(
            Effect(lam * np.outer(u[:, k], u[:, k].conj()) + (1 - lam) * eye / d)
            for k in range(d)
        )
    )


def random_measurement_pair(rng: np.random.Generator, d: int, kind: int) -> MeasurementPair:
    builders = {
        0: (random_pvm, random_pvm),
        1: (random_pvm, smeared_pvm),
        2: (random_povm, random_povm),
    }
    first, second = builders[kind % 3]
    return MeasurementPair(first(rng, d), second(rng, d))


def random_density_matrix(rng: np.random.Generator, d: int) -> np.ndarray:
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)
