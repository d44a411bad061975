"""Seeded polynomial families that satisfy each hypothesis class by construction."""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, replace
from typing import List, Optional

import numpy as np

from .poly import Polynomial, from_roots

__all__ = [
    "Kind",
    "Named",
    "FamilySpec",
    "generate",
    "named_polynomial",
    "corpus",
    "child_seed",
    "PRESETS",
]


class Kind(str, enum.Enum):
    UNRESTRICTED = "unrestricted"
    NONVANISHING_DISK = "nonvanishing"
    SELF_INVERSIVE = "self_inversive"
    NAMED = "named"


class Named(str, enum.Enum):
    MONOMIAL = "monomial"    # a z^n
    BINOMIAL = "binomial"    # a z^n + b
    PLUS_ONE = "plus_one"    # z^n + 1
    COUNTEREX = "counterex"  # (1 - i z)^n


@dataclass(frozen=True)
class FamilySpec:
    kind: Kind
    degree: int
    scale: float = 1.0
    seed: int = 0
    max_degree: Optional[int] = None  # draw n uniformly from [degree, max_degree]
    rmax: float = 3.0
    radius_margin: float = 0.0  # force |r| >= 1 + radius_margin
    phase: Optional[float] = None  # u = e^{i phase}; drawn when None
    named: Optional[Named] = None
    a: complex = 1.0
    b: complex = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        if self.named is not None:
            object.__setattr__(self, "named", Named(self.named))
        if int(self.degree) != self.degree or self.degree < 1:
            raise ValueError(f"degree must be an integer >= 1, got {self.degree!r}")
        if self.max_degree is not None and self.max_degree < self.degree:
            raise ValueError("max_degree must be >= degree")
        if not self.rmax >= 1.0:
            raise ValueError("rmax must be >= 1")
        if self.radius_margin < 0 or math.log1p(self.radius_margin) > math.log(self.rmax):
            raise ValueError("radius_margin must lie in [0, rmax - 1]")
        if not (math.isfinite(self.scale) and self.scale > 0):
            raise ValueError("scale must be positive and finite")
        if self.kind is Kind.NAMED and self.named is None:
            raise ValueError("NAMED family needs a named id")
        if self.kind is Kind.NAMED and self.named is Named.MONOMIAL and complex(self.a) == 0:
            raise ValueError("monomial needs a != 0")

    @property
    def label(self) -> str:
        return self.named.value if self.kind is Kind.NAMED else self.kind.value

    def to_json(self) -> dict:
        d = asdict(self)
        d["kind"] = self.kind.value
        d["named"] = self.named.value if self.named else None
        d["a"] = [complex(self.a).real, complex(self.a).imag]
        d["b"] = [complex(self.b).real, complex(self.b).imag]
        return d

    @classmethod
    def from_json(cls, d: dict) -> "FamilySpec":
        d = dict(d)
        for key in ("a", "b"):
            if isinstance(d.get(key), list):
                d[key] = complex(*d[key])
        return cls(**d)


PRESETS = {
    "unrestricted": dict(kind=Kind.UNRESTRICTED),
    "nonvanishing": dict(kind=Kind.NONVANISHING_DISK),
    "self-inversive": dict(kind=Kind.SELF_INVERSIVE),
    "self_inversive": dict(kind=Kind.SELF_INVERSIVE),
    "monomial": dict(kind=Kind.NAMED, named=Named.MONOMIAL),
    "binomial": dict(kind=Kind.NAMED, named=Named.BINOMIAL),
    "plus-one": dict(kind=Kind.NAMED, named=Named.PLUS_ONE),
    "plus_one": dict(kind=Kind.NAMED, named=Named.PLUS_ONE),
    "counterex": dict(kind=Kind.NAMED, named=Named.COUNTEREX),
}


def _cgauss(rng: np.random.Generator, size) -> np.ndarray:
    return (rng.standard_normal(size) + 1j * rng.standard_normal(size)) / math.sqrt(2.0)


def named_polynomial(named: Named, n: int, a: complex = 1.0, b: complex = 1.0) -> Polynomial:
    c = np.zeros(n + 1, dtype=complex)
    if named is Named.MONOMIAL:
        c[n] = a
    elif named is Named.BINOMIAL:
        c[n] += a
        c[0] += b
    elif named is Named.PLUS_ONE:
        c[n] += 1.0
        c[0] += 1.0
    elif named is Named.COUNTEREX:
        c[:] = [math.comb(n, k) * (-1j) ** k for k in range(n + 1)]
    return Polynomial(c, n)


def generate(spec: FamilySpec, rng: np.random.Generator) -> Polynomial:
    """Draw one polynomial from ``spec`` using ``rng``."""
    n = spec.degree
    if spec.max_degree is not None:
        n = int(rng.integers(spec.degree, spec.max_degree + 1))
    s = spec.scale

    if spec.kind is Kind.NAMED:
        return named_polynomial(spec.named, n, spec.a, spec.b)

    if spec.kind is Kind.UNRESTRICTED:
        return Polynomial(s * _cgauss(rng, n + 1), n)

    if spec.kind is Kind.NONVANISHING_DISK:
        lo = math.log1p(spec.radius_margin)
        radii = np.exp(rng.uniform(lo, math.log(spec.rmax), n))
        phases = rng.uniform(0.0, 2 * math.pi, n)
        lead = s * np.exp(1j * rng.uniform(0.0, 2 * math.pi))
        return from_roots(radii * np.exp(1j * phases), lead)

    # SELF_INVERSIVE: a_{n-k} = u conj(a_k)
    phi = rng.uniform(0.0, 2 * math.pi) if spec.phase is None else float(spec.phase)
    u = np.exp(1j * phi)
    c = np.zeros(n + 1, dtype=complex)
    half = (n + 1) // 2
    c[:half] = s * _cgauss(rng, half)
    c[n - half + 1:] = u * np.conj(c[:half][::-1])
    if n % 2 == 0:
        # a = u conj(a) forces a = t u^{1/2}, t real
        c[n // 2] = s * rng.standard_normal() * np.exp(0.5j * phi)
    return Polynomial(c, n)


def child_seed(master_seed: int, index: int) -> int:
    """64-bit seed for trial ``index``, hashed from ``(master_seed, index)``."""
    ss = np.random.SeedSequence(entropy=int(master_seed), spawn_key=(int(index),))
    lo, hi = ss.generate_state(2, dtype=np.uint32)
    return (int(hi) << 32) | int(lo)


def corpus(spec: FamilySpec, count: int, master_seed: Optional[int] = None) -> List[Polynomial]:
    """``count`` polynomials; trial ``i`` is drawn from ``child_seed(master, i)``."""
    if count < 1:
        raise ValueError("count must be >= 1")
    master = spec.seed if master_seed is None else master_seed
    return [generate(spec, np.random.default_rng(child_seed(master, i))) for i in range(count)]


def with_degree(spec: FamilySpec, n: int) -> FamilySpec:
    return replace(spec, degree=n, max_degree=None)
