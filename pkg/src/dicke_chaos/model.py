"""Model parameters and the even-parity product basis of the Dicke model.

The Hamiltonian H = omega a^dag a + omega0 J_z + (2 lambda / sqrt(N)) J_x (a^dag + a)
conserves the parity Pi = exp(i pi (a^dag a + J_z + j)).  Everything downstream
works in the even-parity block of the j = N/2 subspace, spanned by product
states |n>|j, m> with n + m + j even.
"""

from __future__ import annotations

from dataclasses import dataclass, field


class ValidationError(ValueError):
    """Invalid model parameter; carries the offending field name."""

    def __init__(self, field_name: str, message: str):
        self.field_name = field_name
        super().__init__(f"{field_name}: {message}")


@dataclass(frozen=True)
class ModelParams:
    """Single source of truth for one run.

    omega    : cavity frequency (> 0)
    omega0   : atomic level splitting (> 0)
    coupling : atom-cavity coupling lambda (>= 0)
    n_atoms  : number of atoms N, positive and even (j = N/2 integer)
    n_trc    : bosonic truncation, positive and even
    """

    omega: float
    omega0: float
    coupling: float
    n_atoms: int
    n_trc: int

    def __post_init__(self):
        # coerce numeric types so equal parameter sets hash/serialize equally
        # (e.g. omega=1 and omega=1.0 must address the same cache entry)
        object.__setattr__(self, "omega", float(self.omega))
        object.__setattr__(self, "omega0", float(self.omega0))
        object.__setattr__(self, "coupling", float(self.coupling))
        object.__setattr__(self, "n_atoms", int(self.n_atoms))
        object.__setattr__(self, "n_trc", int(self.n_trc))
        if not self.omega > 0:
            raise ValidationError("omega", f"must be > 0, got {self.omega}")
        if not self.omega0 > 0:
            raise ValidationError("omega0", f"must be > 0, got {self.omega0}")
        if self.coupling < 0:
            raise ValidationError("coupling", f"must be >= 0, got {self.coupling}")
        if self.n_atoms <= 0 or self.n_atoms % 2 != 0:
            raise ValidationError(
                "n_atoms", f"must be a positive even integer, got {self.n_atoms}"
            )
        if self.n_trc <= 0 or self.n_trc % 2 != 0:
            raise ValidationError(
                "n_trc", f"must be a positive even integer, got {self.n_trc}"
            )

    @property
    def j(self) -> int:
        return self.n_atoms // 2

    def to_dict(self) -> dict:
        return {
            "omega": self.omega,
            "omega0": self.omega0,
            "coupling": self.coupling,
            "n_atoms": self.n_atoms,
            "n_trc": self.n_trc,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ModelParams":
        return cls(
            omega=float(d["omega"]),
            omega0=float(d["omega0"]),
            coupling=float(d["coupling"]),
            n_atoms=int(d["n_atoms"]),
            n_trc=int(d["n_trc"]),
        )


@dataclass(frozen=True)
class BasisState:
    """Product state |n_boson> |j, m>."""

    n_boson: int
    m: int


@dataclass
class BasisIndex:
    """Deterministically ordered even-parity basis with O(1) lookup."""

    params: ModelParams
    states: list = field(default_factory=list)
    _lookup: dict = field(default_factory=dict, repr=False)

    @property
    def size(self) -> int:
        return len(self.states)

    def index_of(self, n_boson: int, m: int) -> int:
        return self._lookup[(n_boson, m)]

    def __contains__(self, key) -> bool:
        return key in self._lookup


def build_even_parity_basis(params: ModelParams) -> BasisIndex:
    """Enumerate all |n, m> with n + m + j even, lexicographic in (n, m)."""
    j = params.j
    states = []
    for n in range(params.n_trc + 1):
        for m in range(-j, j + 1):
            if (n + m + j) % 2 == 0:
                states.append(BasisState(n, m))
    basis = BasisIndex(params=params, states=states)
    basis._lookup = {(s.n_boson, s.m): i for i, s in enumerate(states)}
    expected = hilbert_dims(params)[1]
    assert basis.size == expected, (
        f"even-sector enumeration ({basis.size}) disagrees with the closed-form "
        f"dimension ({expected})"
    )
    return basis


def hilbert_dims(params: ModelParams) -> tuple[int, int]:
    """(full j=N/2 subspace dimension, even-parity block dimension)."""
    n, t = params.n_atoms, params.n_trc
    d_full = (n + 1) * (t + 1)
    d_even = (n // 2 + 1) * (t + 1) - t // 2
    return d_full, d_even
