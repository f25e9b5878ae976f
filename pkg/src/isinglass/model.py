"""Parameter and data containers for pairwise binary-spin models.

A model over ``N`` spins ``x in {-1, +1}^N`` is parameterized by one coupling
``K_ij`` per unordered pair ``(i, j)`` with ``i < j`` plus a bias ``h_i`` per
spin.  The probability weight of a configuration is ``exp(-E(x))`` with

    E(x) = - sum_{i<j} K_ij x_i x_j - sum_i h_i x_i

i.e. each pair is counted once.  Couplings are stored as a flat float64
array of length ``N(N-1)/2`` in row-major order over ``i < j``:

    (0,1), (0,2), ..., (0,N-1), (1,2), ..., (N-2,N-1)

which is exactly the order produced by ``numpy.triu_indices(N, 1)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

__all__ = [
    "IsingModel",
    "SpinDataset",
    "LocalFieldTable",
    "ModelFormatError",
    "n_pairs",
    "pair_index",
    "pair_indices",
    "couplings_to_dense",
    "dense_to_couplings",
    "as_spins",
    "energy",
    "local_fields",
    "flip_energy_delta",
    "flip",
    "model_to_dict",
    "model_from_dict",
    "write_model",
    "read_model",
]


class ModelFormatError(ValueError):
    """Raised when a model file does not follow the documented JSON schema."""


def n_pairs(n_spins: int) -> int:
    """Number of unordered spin pairs, ``N(N-1)/2``."""
    return n_spins * (n_spins - 1) // 2


def pair_index(n_spins: int, i: int, j: int) -> int:
    """Flat index of pair ``(i, j)``, ``i < j``, in the coupling array."""
    if not 0 <= i < j < n_spins:
        raise ValueError(f"pair ({i}, {j}) out of range for n_spins={n_spins}")
    return i * (2 * n_spins - i - 1) // 2 + (j - i - 1)


def pair_indices(n_spins: int) -> tuple[np.ndarray, np.ndarray]:
    """Row/column indices of all pairs, aligned with the flat coupling layout."""
    return np.triu_indices(n_spins, k=1)


def couplings_to_dense(n_spins: int, couplings: np.ndarray) -> np.ndarray:
    """Expand a flat coupling array to the symmetric ``N x N`` matrix (zero diagonal)."""
    mat = np.zeros((n_spins, n_spins), dtype=np.float64)
    iu, ju = pair_indices(n_spins)
    mat[iu, ju] = couplings
    mat[ju, iu] = couplings
    return mat


def dense_to_couplings(mat: np.ndarray) -> np.ndarray:
    """Extract the flat coupling array from a symmetric matrix."""
    mat = np.asarray(mat, dtype=np.float64)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError("coupling matrix must be square")
    iu, ju = pair_indices(mat.shape[0])
    return np.ascontiguousarray(mat[iu, ju])


def _frozen(arr: np.ndarray, dtype, shape_hint: str) -> np.ndarray:
    out = np.array(arr, dtype=dtype, copy=True)
    if out.ndim != 1:
        raise ValueError(f"{shape_hint} must be one-dimensional")
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class IsingModel:
    """Couplings and biases of a pairwise spin model.

    Parameters
    ----------
    n_spins : int
        Number of spins ``N``.
    couplings : ndarray
        Flat float64 array of length ``N(N-1)/2`` (see module docstring for
        the pair order).
    biases : ndarray
        Float64 array of length ``N``.

    Instances are immutable; the arrays are copied and marked read-only.
    """

    n_spins: int
    couplings: np.ndarray
    biases: np.ndarray

    def __post_init__(self):
        if self.n_spins < 1:
            raise ValueError("n_spins must be positive")
        couplings = _frozen(self.couplings, np.float64, "couplings")
        biases = _frozen(self.biases, np.float64, "biases")
        if couplings.shape[0] != n_pairs(self.n_spins):
            raise ValueError(
                f"expected {n_pairs(self.n_spins)} couplings for n_spins={self.n_spins}, "
                f"got {couplings.shape[0]}"
            )
        if biases.shape[0] != self.n_spins:
            raise ValueError(f"expected {self.n_spins} biases, got {biases.shape[0]}")
        if not np.all(np.isfinite(couplings)) or not np.all(np.isfinite(biases)):
            raise ValueError("model parameters must be finite")
        object.__setattr__(self, "couplings", couplings)
        object.__setattr__(self, "biases", biases)

    @classmethod
    def zeros(cls, n_spins: int) -> "IsingModel":
        return cls(n_spins, np.zeros(n_pairs(n_spins)), np.zeros(n_spins))

    @classmethod
    def from_pairs(cls, n_spins, pairs, biases) -> "IsingModel":
        """Build a model from a ``{(i, j): value}`` mapping (``i < j`` required)."""
        couplings = np.zeros(n_pairs(n_spins))
        for (i, j), value in pairs.items():
            couplings[pair_index(n_spins, i, j)] = value
        return cls(n_spins, couplings, np.asarray(biases, dtype=np.float64))

    def coupling(self, i: int, j: int) -> float:
        """Coupling of the unordered pair ``{i, j}`` (order-insensitive)."""
        if i == j:
            raise ValueError("no self-couplings: i == j")
        if i > j:
            i, j = j, i
        return float(self.couplings[pair_index(self.n_spins, i, j)])

    def dense_couplings(self) -> np.ndarray:
        """Symmetric ``N x N`` coupling matrix with zero diagonal."""
        return couplings_to_dense(self.n_spins, self.couplings)

    def nonzero_pairs(self) -> list[tuple[int, int, float]]:
        """``(i, j, value)`` triples for all nonzero couplings, in layout order."""
        iu, ju = pair_indices(self.n_spins)
        keep = np.nonzero(self.couplings)[0]
        return [(int(iu[p]), int(ju[p]), float(self.couplings[p])) for p in keep]


def as_spins(values, n_spins: int | None = None) -> np.ndarray:
    """Validate and convert a spin configuration to an int8 array of +-1."""
    arr = np.asarray(values)
    if arr.ndim != 1:
        raise ValueError("spin configuration must be one-dimensional")
    if not np.all(np.isin(arr, (-1, 1))):
        raise ValueError("spins must be -1 or +1")
    if n_spins is not None and arr.shape[0] != n_spins:
        raise ValueError(f"expected {n_spins} spins, got {arr.shape[0]}")
    return arr.astype(np.int8)


@dataclass(frozen=True, eq=False)
class SpinDataset:
    """An ordered collection of spin configurations.

    ``configurations`` is a ``(D, N)`` int8 array with entries in ``{-1, +1}``.
    The container itself allows ``D = 0``; estimation routines require
    ``D >= 1`` and raise otherwise.
    """

    configurations: np.ndarray

    def __post_init__(self):
        arr = np.array(self.configurations, dtype=np.int8, copy=True)
        if arr.ndim != 2:
            raise ValueError("configurations must be a (D, N) array")
        if arr.size and not np.all(np.isin(arr, (-1, 1))):
            raise ValueError("spins must be -1 or +1")
        arr.setflags(write=False)
        object.__setattr__(self, "configurations", arr)

    @property
    def n_spins(self) -> int:
        return self.configurations.shape[1]

    @property
    def n_samples(self) -> int:
        return self.configurations.shape[0]

    def prefix(self, d: int) -> "SpinDataset":
        """The first ``d`` configurations as a new dataset."""
        if not 1 <= d <= self.n_samples:
            raise ValueError(f"prefix length {d} out of range (D={self.n_samples})")
        return SpinDataset(self.configurations[:d])


@dataclass(frozen=True, eq=False)
class LocalFieldTable:
    """Per-sample, per-site fields ``theta[k, i] = sum_{j != i} K_ij x_j^(k) + h_i``."""

    theta: np.ndarray

    def __post_init__(self):
        arr = np.array(self.theta, dtype=np.float64, copy=True)
        if arr.ndim != 2:
            raise ValueError("theta must be a (D, N) array")
        if not np.all(np.isfinite(arr)):
            raise ValueError("theta entries must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "theta", arr)


def _check_lengths(model: IsingModel, n: int) -> None:
    if n != model.n_spins:
        raise ValueError(f"dimension mismatch: model has {model.n_spins} spins, data has {n}")


def energy(model: IsingModel, spins) -> float:
    """Energy ``E(x) = -sum_{i<j} K_ij x_i x_j - sum_i h_i x_i``."""
    x = as_spins(spins)
    _check_lengths(model, x.shape[0])
    xf = x.astype(np.float64)
    iu, ju = pair_indices(model.n_spins)
    pair_term = float(np.dot(model.couplings, xf[iu] * xf[ju]))
    return -pair_term - float(np.dot(model.biases, xf))


def local_fields(model: IsingModel, data: SpinDataset) -> LocalFieldTable:
    """Local fields for every configuration in ``data`` (couplings treated symmetrically)."""
    _check_lengths(model, data.n_spins)
    x = data.configurations.astype(np.float64)
    theta = x @ model.dense_couplings() + model.biases
    return LocalFieldTable(theta)


def flip_energy_delta(model: IsingModel, spins, i: int) -> float:
    """Energy change from flipping spin ``i``: ``2 x_i (sum_{j != i} K_ij x_j + h_i)``."""
    x = as_spins(spins)
    _check_lengths(model, x.shape[0])
    if not 0 <= i < model.n_spins:
        raise IndexError(f"spin index {i} out of range for n_spins={model.n_spins}")
    xf = x.astype(np.float64)
    theta_i = float(np.dot(model.dense_couplings()[i], xf) + model.biases[i])
    return 2.0 * float(x[i]) * theta_i


def flip(spins, i: int) -> np.ndarray:
    """A copy of ``spins`` with spin ``i`` negated."""
    x = as_spins(spins)
    if not 0 <= i < x.shape[0]:
        raise IndexError(f"spin index {i} out of range")
    out = x.copy()
    out[i] = -out[i]
    return out


# --- model file format -------------------------------------------------------
#
# JSON schema: {"n_spins": N, "couplings": [[i, j, value], ...], "biases": [...]}
# with i < j in every entry and no duplicate pairs.  Unknown keys are rejected.
# By default only nonzero couplings are written (dense=True writes all pairs).

_MODEL_KEYS = {"n_spins", "couplings", "biases"}


def model_to_dict(model: IsingModel, dense: bool = False) -> dict:
    if dense:
        iu, ju = pair_indices(model.n_spins)
        entries = [
            [int(i), int(j), float(v)] for i, j, v in zip(iu, ju, model.couplings)
        ]
    else:
        entries = [[i, j, v] for i, j, v in model.nonzero_pairs()]
    return {
        "n_spins": model.n_spins,
        "couplings": entries,
        "biases": [float(b) for b in model.biases],
    }


def model_from_dict(payload: dict) -> IsingModel:
    if not isinstance(payload, dict):
        raise ModelFormatError("model document must be a JSON object")
    extra = set(payload) - _MODEL_KEYS
    if extra:
        raise ModelFormatError(f"unknown keys in model document: {sorted(extra)}")
    missing = _MODEL_KEYS - set(payload)
    if missing:
        raise ModelFormatError(f"missing keys in model document: {sorted(missing)}")
    n = payload["n_spins"]
    if not isinstance(n, int) or n < 1:
        raise ModelFormatError("n_spins must be a positive integer")
    couplings = np.zeros(n_pairs(n))
    seen = set()
    for entry in payload["couplings"]:
        if not isinstance(entry, (list, tuple)) or len(entry) != 3:
            raise ModelFormatError(f"coupling entry must be [i, j, value]: {entry!r}")
        i, j, value = entry
        if not (isinstance(i, int) and isinstance(j, int)) or not 0 <= i < j < n:
            raise ModelFormatError(f"coupling pair ({i}, {j}) must satisfy 0 <= i < j < N")
        if (i, j) in seen:
            raise ModelFormatError(f"duplicate coupling pair ({i}, {j})")
        seen.add((i, j))
        couplings[pair_index(n, i, j)] = float(value)
    biases = payload["biases"]
    if len(biases) != n:
        raise ModelFormatError(f"expected {n} biases, got {len(biases)}")
    try:
        return IsingModel(n, couplings, np.asarray(biases, dtype=np.float64))
    except ValueError as exc:
        raise ModelFormatError(str(exc)) from exc


def write_model(path, model: IsingModel, dense: bool = False) -> None:
    """Write ``model`` to ``path`` in the JSON schema (byte-deterministic)."""
    text = json.dumps(model_to_dict(model, dense=dense), indent=2) + "\n"
    with open(path, "w", encoding="ascii") as handle:
        handle.write(text)


def read_model(path) -> IsingModel:
    with open(path, "r", encoding="ascii") as handle:
        try:
            payload = json.load(handle)
        except json.JSONDecodeError as exc:
            raise ModelFormatError(f"invalid JSON in model file: {exc}") from exc
    return model_from_dict(payload)
