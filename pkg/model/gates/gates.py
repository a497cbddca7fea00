from dataclasses import dataclass, replace
from enum import Enum
from itertools import combinations
from typing import Iterator, Optional

import numpy as np

from utils.errors import GeneratorIndexError, RangeError, SiteError
from utils.linalg import DTYPE


class Axis(Enum):
    X = "X"
    Y = "Y"
    Z = "Z"


AXES = (Axis.X, Axis.Y, Axis.Z)


@dataclass(frozen=True)
class GellMannGenerator:
    """Gell-Mann label on 1-based kets |1>..|d'>; ket m addresses amplitude m - 1"""
    axis: Axis
    j: int
    qudit_dim: int
    k: Optional[int] = None

    def __post_init__(self):
        """Validate index ranges for the axis"""
        d = self.qudit_dim
        if d < 2:
            raise GeneratorIndexError(f"qudit dimension must be >= 2, got {d}")
        if self.axis is Axis.Z:
            if self.k is not None:
                raise GeneratorIndexError("Z generators take no k index")
            if not 1 <= self.j <= d - 1:
                raise GeneratorIndexError(f"Z index j={self.j} outside [1, {d - 1}]")
        else:
            if self.k is None or not 1 <= self.j < self.k <= d:
                raise GeneratorIndexError(
                    f"{self.axis.value} indices (j={self.j}, k={self.k}) violate 1 <= j < k <= {d}"
                )

    def to_dict(self) -> dict:
        return {"axis": self.axis.value, "j": self.j, "k": self.k, "qudit_dim": self.qudit_dim}

    @classmethod
    def from_dict(cls, data: dict) -> "GellMannGenerator":
        return cls(Axis(data["axis"]), int(data["j"]), int(data["qudit_dim"]),
                   None if data.get("k") is None else int(data["k"]))


@dataclass(frozen=True)
class RotationGate:
    generator: GellMannGenerator
    angle: float

    @property
    def qudit_dim(self) -> int:
        return self.generator.qudit_dim

    def with_angle(self, angle: float) -> "RotationGate":
        return replace(self, angle=float(angle))


@dataclass(frozen=True)
class QuditCnot:
    qudit_dim: int

    def matrix(self) -> np.ndarray:
        """Dense d'^2 x d'^2 permutation, control on the first factor."""
        d = self.qudit_dim
        m = np.zeros((d * d, d * d), dtype=DTYPE)
        for x in range(d):
            for y in range(d):
                m[x * d + (x + y) % d, x * d + y] = 1.0
        return m


def _z_diagonal(j: int, d: int) -> np.ndarray:
    coeff = np.sqrt(2.0 / (j * (j + 1)))
    diag = np.zeros(d)
    diag[:j] = coeff
    diag[j] = -j * coeff
    return diag


def gell_mann_matrix(gen: GellMannGenerator) -> np.ndarray:
    """Dense generator matrix, traceless with Tr[S^2] = 2"""
    d = gen.qudit_dim
    if gen.axis is Axis.Z:
        return np.diag(_z_diagonal(gen.j, d)).astype(DTYPE)

    s = np.zeros((d, d), dtype=DTYPE)
    a, b = gen.j - 1, gen.k - 1
    if gen.axis is Axis.X:
        s[a, b] = 1.0
        s[b, a] = 1.0
    else:
        s[a, b] = -1.0j
        s[b, a] = 1.0j
    return s


def rotation_matrix(gate: RotationGate) -> np.ndarray:
    """exp(-i theta S / 2) in closed form."""
    gen = gate.generator
    d = gen.qudit_dim
    half = gate.angle / 2.0
    if gen.axis is Axis.Z:
        return np.diag(np.exp(-1.0j * half * _z_diagonal(gen.j, d)))

    # S^2 is the projector onto span{|j>, |k>}
    r = np.eye(d, dtype=DTYPE)
    a, b = gen.j - 1, gen.k - 1
    r[a, a] = r[b, b] = np.cos(half)
    r -= 1.0j * np.sin(half) * gell_mann_matrix(gen)
    return r


def all_generators(d: int) -> Iterator[GellMannGenerator]:
    """Every valid generator at qudit dimension d, X pairs then Y pairs then Z."""
    for axis in (Axis.X, Axis.Y):
        for j, k in combinations(range(1, d + 1), 2):
            yield GellMannGenerator(axis, j, d, k)
    for j in range(1, d):
        yield GellMannGenerator(Axis.Z, j, d)


def random_generator(rng: np.random.Generator, d: int) -> GellMannGenerator:
    """Uniform axis, then a uniform index pair (X, Y) or diagonal index (Z)"""
    if d < 2:
        raise GeneratorIndexError(f"qudit dimension must be >= 2, got {d}")
    axis = AXES[int(rng.integers(3))]
    if axis is Axis.Z:
        return GellMannGenerator(axis, int(rng.integers(1, d)), d)
    pair_count = d * (d - 1) // 2
    j, k = _pair_from_rank(int(rng.integers(pair_count)), d)
    return GellMannGenerator(axis, j, d, k)


def _pair_from_rank(rank: int, d: int):
    # lexicographic rank over 1 <= j < k <= d
    j = 1
    while rank >= d - j:
        rank -= d - j
        j += 1
    return j, j + 1 + rank


def check_cnot_sites(n: int, control: int, target: int) -> None:
    """Raise SiteError unless control and target are distinct sites of an n-qudit register"""
    if control == target:
        raise SiteError(f"control and target coincide (site {control})")
    for site in (control, target):
        if not 0 <= site < n:
            raise SiteError(f"site {site} outside register of {n} qudits")


def cnot_apply_amplitudes(amplitudes: np.ndarray, n: int, d: int, control: int, target: int) -> np.ndarray:
    """Add the control digit into the target digit mod d' on the last axis; leading batch axes allowed"""
    check_cnot_sites(n, control, target)
    if amplitudes.shape[-1] != d ** n:
        raise RangeError(f"state length {amplitudes.shape[-1]} != {d}^{n}")
    tensor = amplitudes.reshape(amplitudes.shape[:-1] + (d,) * n)
    offset = tensor.ndim - n
    # indexing the control axis away shifts later axes down by one
    target_axis = offset + target - (1 if target > control else 0)
    out = np.empty_like(tensor)
    for x in range(d):
        index = (slice(None),) * (offset + control) + (x,)
        out[index] = np.roll(tensor[index], x, axis=target_axis)
    return out.reshape(amplitudes.shape)


def cnot_apply(state, control: int, target: int, d: int):
    """|..x..y..> -> |..x..(x+y mod d')..> on a PureState, returning a new state."""
    if d != state.qudit_dim:
        raise SiteError(f"CNOT dimension {d} does not match register dimension {state.qudit_dim}")
    return replace(state, amplitudes=cnot_apply_amplitudes(state.amplitudes, state.n, d, control, target))
