"""Quadratic characters: Jacobi symbols (k/m), Kronecker symbols (m/k), and the
auxiliary characters psi_j = (4j/.) used with the 2-part of a modulus.

Two conventions coexist and are easy to confuse:

* ``jacobi_bottom`` with parameter m is k -> (k/m), a character mod m (m odd, > 0);
* ``kronecker_top`` with parameter m is k -> (m/k), a character mod |m|
  (m = 0 or 1 mod 4).
"""
from __future__ import annotations

from dataclasses import dataclass

from .arith import squarefree_part

JACOBI_BOTTOM = "jacobi_bottom"
KRONECKER_TOP = "kronecker_top"
AUX_PSI = "aux_psi"
PRINCIPAL = "principal"
KINDS = (JACOBI_BOTTOM, KRONECKER_TOP, AUX_PSI, PRINCIPAL)


def jacobi_symbol(a: int, m: int) -> int:
    """Jacobi symbol (a/m) for odd m >= 1, by the binary reciprocity loop."""
    if m < 1 or m % 2 == 0:
        raise ValueError(f"Jacobi symbol needs an odd positive modulus, got {m}")
    a %= m
    t = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if m % 8 in (3, 5):
                t = -t
        a, m = m, a
        if a % 4 == 3 and m % 4 == 3:
            t = -t
        a %= m
    return t if m == 1 else 0


def kronecker_symbol(m: int, q: int) -> int:
    """Kronecker symbol (m/q) for m = 0 or 1 mod 4 and any integer q."""
    if m % 4 not in (0, 1):
        raise ValueError(f"Kronecker top argument must be 0 or 1 mod 4, got {m}")
    if q == 0:
        return 1 if abs(m) == 1 else 0
    t = 1
    if q < 0:
        q = -q
        if m < 0:
            t = -t
    e = 0
    while q % 2 == 0:
        q //= 2
        e += 1
    if e:
        if m % 2 == 0:
            return 0
        if e % 2 and m % 8 in (3, 5):
            t = -t
    return t * jacobi_symbol(m, q)


@dataclass(frozen=True)
class QuadraticCharacterHandle:
    """A quadratic character identified by convention and integer parameter.

    ``aux_psi`` with parameter j in {+-1, +-2} is (4j/.); j = 0 is the principal
    character.
    """

    kind: str
    parameter: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown character kind {self.kind!r}")
        p = self.parameter
        if self.kind == JACOBI_BOTTOM and (p < 1 or p % 2 == 0):
            raise ValueError(f"jacobi_bottom needs an odd positive parameter, got {p}")
        if self.kind == KRONECKER_TOP and (p % 4 not in (0, 1) or p == 0):
            raise ValueError(f"kronecker_top needs a nonzero parameter = 0,1 mod 4, got {p}")
        if self.kind == AUX_PSI and p not in (-2, -1, 0, 1, 2):
            raise ValueError(f"aux_psi index must lie in {{0, +-1, +-2}}, got {p}")

    @property
    def modulus(self) -> int:
        if self.kind == JACOBI_BOTTOM:
            return self.parameter
        if self.kind == KRONECKER_TOP:
            return abs(self.parameter)
        if self.kind == AUX_PSI:
            return 4 * abs(self.parameter) or 1
        return 1

    def __call__(self, k: int) -> int:
        return char_value(self, k)

    def is_even(self) -> bool:
        return char_value(self, -1) == 1


def chi_bottom(m: int) -> QuadraticCharacterHandle:
    return QuadraticCharacterHandle(JACOBI_BOTTOM, m)


def chi_top(m: int) -> QuadraticCharacterHandle:
    return QuadraticCharacterHandle(KRONECKER_TOP, m)


def psi(j: int) -> QuadraticCharacterHandle:
    return QuadraticCharacterHandle(AUX_PSI, j)


def principal() -> QuadraticCharacterHandle:
    return QuadraticCharacterHandle(PRINCIPAL, 1)


def char_value(chi: QuadraticCharacterHandle, k: int) -> int:
    if chi.kind == JACOBI_BOTTOM:
        return jacobi_symbol(k, chi.parameter)
    if chi.kind == KRONECKER_TOP:
        return kronecker_symbol(chi.parameter, k)
    if chi.kind == AUX_PSI and chi.parameter != 0:
        return kronecker_symbol(4 * chi.parameter, k)
    return 1


def value_table(chi: QuadraticCharacterHandle) -> list[int]:
    """Values chi(0), ..., chi(n - 1) over one period n = chi.modulus."""
    return [char_value(chi, j) for j in range(chi.modulus)]


@dataclass(frozen=True)
class FundamentalDiscriminant:
    d: int

    def __post_init__(self):
        if not is_fundamental_discriminant(self.d):
            raise ValueError(f"{self.d} is not a fundamental discriminant")

    @property
    def character(self) -> QuadraticCharacterHandle:
        return chi_top(self.d)

    def __int__(self) -> int:
        return self.d


def is_fundamental_discriminant(d: int) -> bool:
    if d == 0:
        return False
    if d == 1:
        return True
    if d % 4 == 1:
        return squarefree_part(abs(d)) == abs(d)
    if d % 4 == 0:
        m = d // 4
        return m % 4 in (2, 3) and squarefree_part(abs(m)) == abs(m)
    return False


def fundamental_discriminant_of(n: int) -> FundamentalDiscriminant:
    """The discriminant d with (d/.) the primitive character inducing (./n)."""
    if n < 1 or n % 2 == 0:
        raise ValueError(f"expected an odd positive integer, got {n}")
    n0 = squarefree_part(n)
    return FundamentalDiscriminant(n0 if n0 % 4 == 1 else -n0)
