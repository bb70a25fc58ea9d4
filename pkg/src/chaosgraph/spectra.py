"""Dense symmetric eigensolver wrapper and eigenvalue clustering."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalFailure, SizeLimitExceeded

MAX_DENSE_VERTICES = 4096
CLUSTER_RTOL = 1e-8


@dataclass(frozen=True, eq=False)
class SpectralReport:
    """Ascending eigenvalues plus ``(value, multiplicity)`` groups."""

    eigenvalues: np.ndarray
    groups: tuple[tuple[float, int], ...]
    matrix_kind: str

    def multiplicity(self, value: float, tol: float = 1e-8) -> int:
        return int(np.sum(np.abs(self.eigenvalues - value) <= tol))

    def rows(self) -> list[tuple[int, float, float, int]]:
        """CSV rows ``(index, eigenvalue, group_value, multiplicity)``."""
        out = []
        i = 0
        for value, mult in self.groups:
            for _ in range(mult):
                out.append((i, float(self.eigenvalues[i]), value, mult))
                i += 1
        return out

    def to_dict(self) -> dict:
        return {
            "matrix_kind": self.matrix_kind,
            "eigenvalues": [float(x) for x in self.eigenvalues],
            "groups": [{"value": v, "multiplicity": m} for v, m in self.groups],
        }


def cluster_eigenvalues(values: np.ndarray) -> tuple[tuple[float, int], ...]:
    """Group sorted eigenvalues that lie within ``1e-8 * max(1, radius)``."""
    values = np.sort(np.asarray(values, dtype=float))
    if values.size == 0:
        return ()
    tol = CLUSTER_RTOL * max(1.0, float(np.max(np.abs(values))))
    groups = []
    start = 0
    for i in range(1, values.size + 1):
        if i == values.size or values[i] - values[i - 1] > tol:
            chunk = values[start:i]
            groups.append((float(chunk.mean()), int(chunk.size)))
            start = i
    return tuple(groups)


def check_dense_size(n: int) -> None:
    if n > MAX_DENSE_VERTICES:
        raise SizeLimitExceeded(
            f"dense eigensolver capped at {MAX_DENSE_VERTICES} vertices, got {n}"
        )


def eigh(matrix: np.ndarray, vectors: bool = False):
    check_dense_size(matrix.shape[0])
    try:
        if vectors:
            return np.linalg.eigh(matrix)
        return np.linalg.eigvalsh(matrix)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"eigensolver did not converge: {exc}") from exc


def normalized_laplacian(adjacency: np.ndarray, degrees: np.ndarray) -> np.ndarray:
    inv_sqrt = 1.0 / np.sqrt(degrees)
    lap = -(adjacency * inv_sqrt[:, None]) * inv_sqrt[None, :]
    lap[np.diag_indices_from(lap)] += 1.0
    return lap


def report(values: np.ndarray, kind: str) -> SpectralReport:
    values = np.sort(np.asarray(values, dtype=float))
    return SpectralReport(values, cluster_eigenvalues(values), kind)
