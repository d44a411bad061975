"""Complex polynomials with an explicit declared degree.

Coefficients are stored lowest power first (``a_0, a_1, ..., a_m``).  The
declared degree ``n`` is carried separately from the numeric degree ``m``
because the polar derivative and the conjugate-reciprocal transform are both
parameterized by ``n``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

__all__ = [
    "Polynomial",
    "UnimodularFactor",
    "RootFindingError",
    "DiskRootReport",
    "derivative",
    "polar_derivative",
    "conj_reciprocal",
    "is_self_inversive",
    "roots",
    "find_roots",
    "RootResult",
    "from_roots",
    "disk_root_report",
    "vanishes_in_open_unit_disk",
    "poly_to_json",
    "poly_from_json",
]

EPS = np.finfo(float).eps


def _as_complex(value, what: str = "value") -> complex:
    z = complex(value)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"{what} must be finite, got {value!r}")
    return z


class Polynomial:
    """Immutable complex polynomial ``sum a_k z^k`` of declared degree ``n``.

    Trailing exact zeros are trimmed at construction; the declared degree is
    kept as given (or defaults to the index of the last nonzero coefficient).
    """

    __slots__ = ("_coeffs", "_degree")

    def __init__(self, coeffs: Iterable, declared_degree: Optional[int] = None):
        arr = np.array(list(coeffs) if not isinstance(coeffs, np.ndarray) else coeffs,
                       dtype=complex).ravel()
        if arr.size == 0:
            raise ValueError("coefficient list must be non-empty")
        if not np.all(np.isfinite(arr)):
            raise ValueError("coefficients must be finite (no NaN/Inf)")
        nz = np.flatnonzero(arr)
        last = int(nz[-1]) if nz.size else 0
        arr = arr[: last + 1].copy()
        arr.setflags(write=False)
        if declared_degree is None:
            declared_degree = last
        declared_degree = int(declared_degree)
        if declared_degree < last:
            raise ValueError(
                f"declared degree {declared_degree} is below the index of the "
                f"last nonzero coefficient ({last})")
        self._coeffs = arr
        self._degree = declared_degree

    # -- basic accessors ---------------------------------------------------
    @property
    def coeffs(self) -> np.ndarray:
        """Trimmed coefficient array (read-only), ``a_0`` first."""
        return self._coeffs

    @property
    def degree(self) -> int:
        """The declared degree ``n``."""
        return self._degree

    @property
    def numeric_degree(self) -> int:
        return len(self._coeffs) - 1

    def padded(self) -> np.ndarray:
        """Coefficients zero-padded to length ``n + 1``."""
        out = np.zeros(self._degree + 1, dtype=complex)
        out[: len(self._coeffs)] = self._coeffs
        return out

    def coeff(self, k: int) -> complex:
        if 0 <= k < len(self._coeffs):
            return complex(self._coeffs[k])
        return 0j

    def is_zero(self) -> bool:
        return not np.any(self._coeffs)

    def max_abs_coeff(self) -> float:
        return float(np.max(np.abs(self._coeffs)))

    def with_degree(self, n: int) -> "Polynomial":
        return Polynomial(self._coeffs, n)

    # -- evaluation --------------------------------------------------------
    def __call__(self, z):
        return evaluate(self, z)

    def on_circle(self, thetas) -> np.ndarray:
        return evaluate(self, np.exp(1j * np.asarray(thetas, dtype=float)))

    # -- arithmetic --------------------------------------------------------
    def _binary(self, other, sign: int) -> "Polynomial":
        if not isinstance(other, Polynomial):
            other = Polynomial([other], 0)
        n = max(self._degree, other._degree)
        a = np.zeros(n + 1, dtype=complex)
        a[: len(self._coeffs)] += self._coeffs
        a[: len(other._coeffs)] += sign * other._coeffs
        return Polynomial(a, n)

    def __add__(self, other):
        return self._binary(other, 1)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, -1)

    def __neg__(self):
        return Polynomial(-self._coeffs, self._degree)

    def __mul__(self, other):
        if isinstance(other, Polynomial):
            return Polynomial(np.convolve(self._coeffs, other._coeffs),
                              self._degree + other._degree)
        return Polynomial(self._coeffs * _as_complex(other, "scalar"), self._degree)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return (self._degree == other._degree
                and self._coeffs.shape == other._coeffs.shape
                and bool(np.all(self._coeffs == other._coeffs)))

    def __hash__(self):
        return hash((self._degree, self._coeffs.tobytes()))

    def __repr__(self):
        return f"Polynomial({self._coeffs.tolist()!r}, declared_degree={self._degree})"


def evaluate(P: Polynomial, z):
    """Horner evaluation; accepts scalars or arrays."""
    scalar = np.isscalar(z)
    z = np.asarray(z, dtype=complex)
    c = P.coeffs
    acc = np.full(z.shape, c[-1], dtype=complex)
    for ak in c[-2::-1]:
        acc = acc * z + ak
    return complex(acc) if scalar else acc


def derivative(P: Polynomial) -> Polynomial:
    c = P.coeffs
    if len(c) == 1:
        return Polynomial([0.0], max(P.degree - 1, 0))
    k = np.arange(1, len(c))
    return Polynomial(k * c[1:], max(P.degree - 1, 0))


def polar_derivative(P: Polynomial, alpha) -> Polynomial:
    """``D_alpha P = n P + (alpha - z) P'`` as a polynomial of declared degree n-1.

    Coefficientwise ``c_k = (n - k) a_k + alpha (k + 1) a_{k+1}``.
    """
    n = P.degree
    if n < 1:
        raise ValueError("polar derivative needs declared degree >= 1 "
                         "(for n = 0 the formula degenerates to 0*P)")
    alpha = _as_complex(alpha, "alpha")
    a = P.padded()
    k = np.arange(n)
    c = (n - k) * a[:n] + alpha * (k + 1) * a[1:]
    return Polynomial(c, n - 1)


def conj_reciprocal(P: Polynomial) -> Polynomial:
    """``Q(z) = z^n conj(P(1/conj z))``, i.e. ``q_k = conj(a_{n-k})``."""
    return Polynomial(np.conj(P.padded()[::-1]), P.degree)


@dataclass(frozen=True)
class UnimodularFactor:
    u: complex

    def __post_init__(self):
        u = _as_complex(self.u, "u")
        if abs(abs(u) - 1.0) > 1e-10:
            raise ValueError(f"|u| must be 1 within 1e-10, got {abs(u)!r}")
        object.__setattr__(self, "u", u)


def is_self_inversive(P: Polynomial, tol: float = 1e-9) -> Optional[UnimodularFactor]:
    """Return ``u`` with ``a_k = u conj(a_{n-k})`` for all k, or ``None``.

    The residual is measured against ``tol * max|a_k|``.  When a factor is
    returned, ``Q = conj(u) P``.
    """
    if P.is_zero():
        raise ValueError("self-inversive test needs a nonzero polynomial")
    a = P.padded()
    mirrored = np.conj(a[::-1])
    k = int(np.argmax(np.abs(a)))
    if mirrored[k] == 0:
        return None
    u = a[k] / mirrored[k]
    u = u / abs(u)
    scale = float(np.max(np.abs(a)))
    if np.max(np.abs(a - u * mirrored)) > tol * scale:
        return None
    return UnimodularFactor(complex(u))


# -- roots ------------------------------------------------------------------

class RootFindingError(RuntimeError):
    """Raised when the simultaneous iteration fails to converge.

    ``estimates`` and ``residuals`` hold the last iterate so callers can fall
    back to another certification route.
    """

    def __init__(self, message: str, estimates: np.ndarray, residuals: np.ndarray):
        super().__init__(message)
        self.estimates = estimates
        self.residuals = residuals


def from_roots(roots_: Sequence, leading=1.0) -> Polynomial:
    """Expand ``leading * prod (z - r)`` by sequential convolution."""
    leading = _as_complex(leading, "leading")
    if leading == 0:
        raise ValueError("leading coefficient must be nonzero")
    c = np.array([leading], dtype=complex)
    for r in roots_:
        r = _as_complex(r, "root")
        c = np.concatenate(([0j], c)) - r * np.concatenate((c, [0j]))
    return Polynomial(c, len(c) - 1)


def _aberth(c: np.ndarray, z: np.ndarray, max_iter: int):
    """Aberth-Ehrlich iteration on monic-normalized ``c`` (low first)."""
    m = len(c) - 1
    absc = np.abs(c)
    k = np.arange(1, m + 1)
    dc = k * c[1:]
    done = np.zeros(m, dtype=bool)
    it = 0
    for it in range(1, max_iter + 1):
        p = np.full(m, c[-1], dtype=complex)
        dp = np.full(m, dc[-1], dtype=complex)
        bound = np.full(m, absc[-1])
        az = np.abs(z)
        for j in range(m - 1, -1, -1):
            p = p * z + c[j]
            bound = bound * az + absc[j]
            if j >= 1:
                dp = dp * z + dc[j - 1]
        done |= np.abs(p) <= 4.0 * (m + 1) * EPS * bound
        if done.all():
            break
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        inv = 1.0 / diff
        np.fill_diagonal(inv, 0.0)
        s = inv.sum(axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            w = p / dp
            step = w / (1.0 - w * s)
        bad = ~np.isfinite(step)
        step[bad] = 1e-3 * (1.0 + np.abs(z[bad]))
        z = np.where(done, z, z - step)
    return z, bool(done.all()), it


def _polish(c: np.ndarray, b: np.ndarray, z: np.ndarray, sweeps: int = 8):
    """Unfrozen Aberth sweeps; keeps the iterate with the smallest product residual.

    Frozen iterates of a multiple root sit asymmetrically inside the cluster;
    a few joint sweeps re-centre it.
    """
    best_z, best_res = z, _product_residual(z, b)
    for _ in range(sweeps):
        p = np.polynomial.polynomial.polyval(z, c)
        dp = np.polynomial.polynomial.polyval(z, np.arange(1, len(c)) * c[1:])
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        inv = 1.0 / diff
        np.fill_diagonal(inv, 0.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            w = p / dp
            step = w / (1.0 - w * inv.sum(axis=1))
        step[~np.isfinite(step)] = 0.0
        z = z - step
        if not np.all(np.isfinite(z)):
            break
        res = _product_residual(z, b)
        if res < best_res:
            best_z, best_res = z, res
    return best_z, best_res


def _product_residual(z: np.ndarray, a: np.ndarray) -> float:
    rebuilt = from_roots(z, a[-1]).padded()
    return float(np.max(np.abs(rebuilt - a)) / np.max(np.abs(a)))


@dataclass(frozen=True)
class RootResult:
    roots: np.ndarray
    residual: float  # relative coefficient residual of the product form
    converged: bool  # every root met the rounding-error stopping test
    attempts: int


def find_roots(P: Polynomial, max_iter: int = 500, restarts: int = 4,
               residual_tol: float = 1e-8) -> RootResult:
    """Aberth-Ehrlich simultaneous iteration with a residual report.

    An attempt is accepted when every iterate passes the rounding-error
    stopping test, or when the product ``a_m prod(z - r_j)`` reproduces the
    coefficients to ``residual_tol`` relative.  Otherwise the start circle is
    perturbed (fixed internal seed) and the iteration restarted.  Multiple
    roots come back as clusters whose spread grows like ``eps**(1/k)``.
    """
    a = P.coeffs
    m = len(a) - 1
    if P.is_zero():
        raise ValueError("the zero polynomial has no finite root set")
    if m < 1:
        return RootResult(np.zeros(0, dtype=complex), 0.0, True, 0)
    k0 = int(np.flatnonzero(a)[0])
    zeros = np.zeros(k0, dtype=complex)
    b = a[k0:]
    mb = len(b) - 1
    if mb == 0:
        return RootResult(zeros, 0.0, True, 0)
    if mb == 1:
        return RootResult(np.concatenate((zeros, [-b[0] / b[1]])), 0.0, True, 0)
    c = b / b[-1]
    radius = float(abs(c[0]) ** (1.0 / mb)) or 1.0
    center = -c[-2] / mb
    rng = np.random.default_rng(20070817)
    angles = 2 * np.pi * np.arange(mb) / mb + 0.4
    best = None
    for attempt in range(restarts + 1):
        jitter = 0.0 if attempt == 0 else rng.uniform(-0.5, 0.5, mb)
        r0 = radius * (1.0 if attempt == 0 else rng.uniform(0.7, 1.3))
        z0 = center + r0 * np.exp(1j * (angles + jitter))
        z, ok, _ = _aberth(c, z0, max_iter)
        if np.all(np.isfinite(z)):
            z, res = _polish(c, b, z)
        else:
            ok, res = False, np.inf
        if best is None or res < best[1]:
            best = (z, res)
        if ok or res <= residual_tol:
            return RootResult(np.concatenate((zeros, z)), res, ok, attempt + 1)
    z, res = best
    resid = (np.abs(evaluate(Polynomial(b), z)) if np.all(np.isfinite(z))
             else np.full(mb, np.inf))
    raise RootFindingError(
        f"Aberth iteration did not converge (product residual {res:.3e})",
        np.concatenate((zeros, z)), resid)


def roots(P: Polynomial, max_iter: int = 500, restarts: int = 4,
          residual_tol: float = 1e-8) -> np.ndarray:
    """All numeric roots of ``P``; see :func:`find_roots`."""
    return find_roots(P, max_iter, restarts, residual_tol).roots


@dataclass(frozen=True)
class DiskRootReport:
    inside: bool
    moduli: tuple
    boundary: tuple  # moduli within tol of the unit circle from below


def disk_root_report(P: Polynomial, tol: float = 1e-9) -> DiskRootReport:
    if P.numeric_degree < 1:
        return DiskRootReport(False, (), ())
    mods = np.sort(np.abs(roots(P)))
    inside = bool(np.any(mods < 1.0 - tol))
    boundary = tuple(float(r) for r in mods if 1.0 - tol <= r <= 1.0)
    return DiskRootReport(inside, tuple(float(r) for r in mods), boundary)


def vanishes_in_open_unit_disk(P: Polynomial, tol: float = 1e-9) -> bool:
    """True iff some root satisfies ``|r| < 1 - tol``.

    Roots with ``|r|`` in ``[1 - tol, 1]`` count as boundary roots, which the
    non-vanishing hypothesis allows; see :func:`disk_root_report`.
    """
    return disk_root_report(P, tol).inside


# -- JSON -------------------------------------------------------------------

def poly_to_json(P: Polynomial) -> dict:
    return {"declared_degree": P.degree,
            "coeffs": [[float(c.real), float(c.imag)] for c in P.coeffs]}


def _reject_constant(name):
    raise ValueError(f"non-finite number {name} is not allowed")


def _number(x, where):
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ValueError(f"{where}: expected a number, got {x!r}")
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"{where}: non-finite value")
    return x


def poly_from_json(obj) -> Polynomial:
    """Build a polynomial from the ``{"declared_degree", "coeffs"}`` schema.

    ``obj`` may be a parsed dict or a JSON string.
    """
    if isinstance(obj, (str, bytes)):
        obj = json.loads(obj, parse_constant=_reject_constant)
    if not isinstance(obj, dict):
        raise ValueError("polynomial JSON must be an object")
    missing = {"declared_degree", "coeffs"} - set(obj)
    if missing:
        raise ValueError(f"missing keys: {sorted(missing)}")
    n = obj["declared_degree"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 0:
        raise ValueError("declared_degree must be a non-negative integer")
    raw = obj["coeffs"]
    if not isinstance(raw, list) or not raw:
        raise ValueError("coeffs must be a non-empty list of [re, im] pairs")
    if len(raw) > n + 1:
        raise ValueError(f"{len(raw)} coefficients exceed declared_degree + 1 = {n + 1}")
    coeffs = []
    for k, pair in enumerate(raw):
        if not isinstance(pair, list) or len(pair) != 2:
            raise ValueError(f"coeffs[{k}] must be a [re, im] pair")
        coeffs.append(complex(_number(pair[0], f"coeffs[{k}][0]"),
                              _number(pair[1], f"coeffs[{k}][1]")))
    return Polynomial(coeffs, n)
