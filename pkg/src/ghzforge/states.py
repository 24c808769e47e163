"""GHZ target state, the three input-state families and the fidelity cost."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from .linalg import is_density

ORTHOGONAL_BASIS_STRINGS = ("001", "010", "011", "100", "101", "110")

_SQRT_HALF = 1.0 / math.sqrt(2.0)


class InputSpecError(ValueError):
    """Raised for an unparseable or out-of-range input-state specification."""


def ghz_state() -> np.ndarray:
    psi = np.zeros(8, dtype=np.complex128)
    psi[0] = psi[7] = _SQRT_HALF
    return psi


GHZ = ghz_state()
GHZ.setflags(write=False)


def pure_to_density(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=np.complex128)
    return np.outer(psi, psi.conj())


def ghz_density() -> np.ndarray:
    return pure_to_density(GHZ)


def white_noise_input(lam: float) -> np.ndarray:
    """``(1 - lam) |GHZ><GHZ| + lam I/8``."""
    lam = float(lam)
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"noise strength must lie in [0, 1], got {lam}")
    return (1.0 - lam) * ghz_density() + (lam / 8.0) * np.eye(8, dtype=np.complex128)


def basis_error_input(bits: str, eps: float) -> np.ndarray:
    """Normalized ``|GHZ> + eps |bits>`` for a basis state orthogonal to GHZ."""
    if bits not in ORTHOGONAL_BASIS_STRINGS:
        raise ValueError(
            f"basis string must be one of {', '.join(ORTHOGONAL_BASIS_STRINGS)}; got {bits!r}"
        )
    eps = float(eps)
    psi = ghz_state()
    psi[int(bits, 2)] += eps
    return psi / math.sqrt(1.0 + eps * eps)


def ghzlike_input(eps: float) -> np.ndarray:
    """Normalized ``(1 - eps)|000> + (1 + eps)|111>`` for ``eps`` in [-1, 1]."""
    eps = float(eps)
    if abs(eps) > 1.0:
        raise ValueError(f"GHZ-like deviation must lie in [-1, 1], got {eps}")
    psi = np.zeros(8, dtype=np.complex128)
    psi[0] = 1.0 - eps
    psi[7] = 1.0 + eps
    return psi / math.sqrt(2.0 * (1.0 + eps * eps))


def fidelity_to_ghz(rho, check: bool = True, tol: float = 1e-9) -> float:
    """Overlap ``<GHZ| rho |GHZ>`` of a 3-qubit density matrix.

    With ``check=False`` the validity test is skipped; the training loop uses
    this on states it has produced itself.
    """
    rho = np.asarray(rho, dtype=np.complex128)
    if check and (rho.shape != (8, 8) or not is_density(rho, tol)):
        raise ValueError("fidelity_to_ghz requires a valid 8x8 density matrix")
    # GHZ only has weight on |000> and |111>.
    f = 0.5 * (rho[0, 0] + rho[0, 7] + rho[7, 0] + rho[7, 7])
    if check and abs(f.imag) > 1e-12:
        raise ValueError(f"fidelity has imaginary part {f.imag:.3e}")
    return float(min(max(f.real, 0.0), 1.0))


@dataclass(frozen=True)
class White:
    lam: float

    def __post_init__(self):
        if not 0.0 <= self.lam <= 1.0:
            raise InputSpecError(f"white noise strength {self.lam} outside [0, 1]")

    def realize(self) -> np.ndarray:
        return white_noise_input(self.lam)

    def __str__(self):
        return f"white:{self.lam!r}"


@dataclass(frozen=True)
class BasisError:
    bits: str
    eps: float

    def __post_init__(self):
        if self.bits not in ORTHOGONAL_BASIS_STRINGS:
            raise InputSpecError(
                f"basis string {self.bits!r} is not orthogonal to GHZ "
                f"(allowed: {', '.join(ORTHOGONAL_BASIS_STRINGS)})"
            )
        if not math.isfinite(self.eps):
            raise InputSpecError(f"basis error amplitude {self.eps} is not finite")

    def realize(self) -> np.ndarray:
        return pure_to_density(basis_error_input(self.bits, self.eps))

    def __str__(self):
        return f"basis:{self.bits}:{self.eps!r}"


@dataclass(frozen=True)
class GhzLike:
    eps: float

    def __post_init__(self):
        if not -1.0 <= self.eps <= 1.0:
            raise InputSpecError(f"GHZ-like deviation {self.eps} outside [-1, 1]")

    def realize(self) -> np.ndarray:
        return pure_to_density(ghzlike_input(self.eps))

    def __str__(self):
        return f"ghzlike:{self.eps!r}"


InputSpec = Union[White, BasisError, GhzLike]

_DECIMAL = r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_DECIMAL_RE = re.compile(_DECIMAL + r"\Z")


def _number(text: str, what: str) -> float:
    if not _DECIMAL_RE.match(text):
        raise InputSpecError(f"{what}: {text!r} is not a decimal number")
    return float(text)


def parse_input_spec(text: str) -> InputSpec:
    """Parse ``white:<lam>``, ``basis:<bbb>:<eps>`` or ``ghzlike:<eps>``."""
    parts = text.strip().split(":")
    kind = parts[0].lower()
    if kind == "white":
        if len(parts) != 2:
            raise InputSpecError(f"malformed spec {text!r}; expected white:<lambda>")
        return White(_number(parts[1], "white noise strength"))
    if kind == "basis":
        if len(parts) != 3:
            raise InputSpecError(f"malformed spec {text!r}; expected basis:<bbb>:<eps>")
        bits = parts[1]
        if not re.fullmatch(r"[01]{3}", bits):
            raise InputSpecError(f"invalid bit string {bits!r}; expected three 0/1 digits")
        return BasisError(bits, _number(parts[2], "basis error amplitude"))
    if kind == "ghzlike":
        if len(parts) != 2:
            raise InputSpecError(f"malformed spec {text!r}; expected ghzlike:<eps>")
        return GhzLike(_number(parts[1], "GHZ-like deviation"))
    raise InputSpecError(
        f"unknown input family {parts[0]!r}; expected white, basis or ghzlike"
    )


def realize(spec) -> np.ndarray:
    """Density matrix for an input spec (string or parsed object)."""
    if isinstance(spec, str):
        spec = parse_input_spec(spec)
    return spec.realize()
