"""Shared pytest configuration and small helpers."""

import numpy as np
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def place(value: int, qubits) -> int:
    """Basis index with ``value`` written little-endian onto ``qubits``."""
    return sum(((value >> i) & 1) << q for i, q in enumerate(qubits))


def read(key: int, qubits) -> int:
    return sum(((key >> q) & 1) << i for i, q in enumerate(qubits))


def random_state(rng: np.random.Generator, N: int) -> np.ndarray:
    a = rng.normal(size=N) + 1j * rng.normal(size=N)
    return a / np.linalg.norm(a)
