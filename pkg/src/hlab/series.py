"""Truncated complex power series on the unit disk.

A :class:`PowerSeries` of order ``N`` holds ``c_0 .. c_{N-1}``. Sums,
Cauchy products, derivatives, reciprocals and formal compositions (inner
series vanishing at 0) return the exact prefix of the true result.
Composition with a disk automorphism is the one operation that carries a
truncation tail, see :func:`compose_with_mobius`.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from numbers import Number

import numpy as np
from scipy import fft as sfft

from .weights import WeightSequence

__all__ = [
    "DEFAULT_ORDER",
    "PowerSeries",
    "MobiusMap",
    "BlaschkeProduct",
    "mobius_series",
    "blaschke_series",
    "mul",
    "power",
    "compose",
    "compose_with_mobius",
    "tail_estimate",
    "weighted_inner",
    "weighted_norm",
    "log_weighted_norm",
    "derivative",
    "reciprocal",
    "eval_at",
    "eval_circle",
    "power_derivative_alpha",
    "kernel_series",
    "parse_symbol",
]

DEFAULT_ORDER = 1024
FFT_THRESHOLD = 64


class PowerSeries:
    """Coefficients ``c_0 .. c_{N-1}`` of a truncated Taylor expansion."""

    __slots__ = ("_c",)
    # make numpy scalars defer to our operators instead of broadcasting
    __array_ufunc__ = None

    def __init__(self, coeffs, order: int | None = None):
        c = np.array(coeffs, dtype=np.complex128).ravel()
        if order is not None:
            if order < 1:
                raise ValueError("order must be >= 1")
            if len(c) < order:
                c = np.concatenate([c, np.zeros(order - len(c), np.complex128)])
            else:
                c = c[:order]
        if len(c) < 1:
            raise ValueError("a power series needs at least one coefficient")
        c.flags.writeable = False
        self._c = c

    @classmethod
    def monomial(cls, n: int, order: int, coeff: complex = 1.0) -> PowerSeries:
        c = np.zeros(order, np.complex128)
        if n < order:
            c[n] = coeff
        return cls(c)

    @classmethod
    def one(cls, order: int) -> PowerSeries:
        return cls.monomial(0, order)

    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    @property
    def order(self) -> int:
        return len(self._c)

    def __len__(self) -> int:
        return len(self._c)

    def __getitem__(self, k):
        return self._c[k]

    def __repr__(self) -> str:
        head = ", ".join(f"{v:.6g}" for v in self._c[:6])
        more = ", ..." if self.order > 6 else ""
        return f"PowerSeries([{head}{more}], order={self.order})"

    def with_order(self, order: int) -> PowerSeries:
        """Truncate or zero-pad to ``order``."""
        return PowerSeries(self._c, order)

    def _check(self, other: PowerSeries) -> None:
        if other.order != self.order:
            raise ValueError(f"order mismatch: {self.order} vs {other.order}")

    def __add__(self, other):
        if isinstance(other, Number):
            c = self._c.copy()
            c[0] += other
            return PowerSeries(c)
        self._check(other)
        return PowerSeries(self._c + other._c)

    __radd__ = __add__

    def __neg__(self):
        return PowerSeries(-self._c)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Number):
            return PowerSeries(self._c * other)
        return mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Number):
            return PowerSeries(self._c / other)
        return mul(self, reciprocal(other))

    def conj_coeffs(self) -> PowerSeries:
        """Series of ``conj(f(conj(z)))``."""
        return PowerSeries(np.conj(self._c))

    def allclose(self, other: PowerSeries, atol: float = 1e-12) -> bool:
        return self.order == other.order and bool(
            np.all(np.abs(self._c - other._c) <= atol)
        )


@dataclass(frozen=True)
class MobiusMap:
    """Disk automorphism ``e^{i theta} (z0 - z) / (1 - conj(z0) z)``."""

    z0: complex
    theta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "z0", complex(self.z0))
        object.__setattr__(self, "theta", float(self.theta))
        if not abs(self.z0) < 1:
            raise ValueError(f"Mobius point must lie in the open disk, got {self.z0}")

    @property
    def phase(self) -> complex:
        return cmath.exp(1j * self.theta)

    def __call__(self, z):
        z0 = self.z0
        return self.phase * (z0 - z) / (1 - np.conj(z0) * z)

    @property
    def spec(self) -> str:
        return f"mobius:{self.z0.real:g},{self.z0.imag:g},{self.theta:g}"


@dataclass(frozen=True)
class BlaschkeProduct:
    """Finite Blaschke product ``e^{i theta} prod_j (z_j - z)/(1 - conj(z_j) z)``."""

    zeros: tuple
    theta: float = 0.0

    def __post_init__(self):
        zs = tuple(complex(z) for z in self.zeros)
        if len(zs) < 1:
            raise ValueError("a Blaschke product needs at least one zero")
        for z in zs:
            if not abs(z) < 1:
                raise ValueError(f"Blaschke zero outside the open disk: {z}")
        object.__setattr__(self, "zeros", zs)
        object.__setattr__(self, "theta", float(self.theta))

    @property
    def order(self) -> int:
        return len(self.zeros)

    def __call__(self, z):
        z = np.asarray(z, dtype=np.complex128)
        out = np.full(z.shape, cmath.exp(1j * self.theta))
        for zj in self.zeros:
            out = out * (zj - z) / (1 - np.conj(zj) * z)
        return out

    def min_zero_separation(self) -> float:
        zs = self.zeros
        if len(zs) < 2:
            return math.inf
        return min(abs(a - b) for i, a in enumerate(zs) for b in zs[i + 1 :])

    @property
    def spec(self) -> str:
        body = ";".join(f"{z.real:g},{z.imag:g}" for z in self.zeros)
        return f"blaschke:{body},{self.theta:g}"


def mobius_series(m: MobiusMap, N: int = DEFAULT_ORDER) -> PowerSeries:
    """Closed-form coefficients: ``c_0 = e^{it} z0``, ``c_k = e^{it}(|z0|^2-1) conj(z0)^{k-1}``."""
    if N < 1:
        raise ValueError("order must be >= 1")
    c = np.empty(N, np.complex128)
    c[0] = m.z0
    if N > 1:
        c[1] = abs(m.z0) ** 2 - 1
        if N > 2:
            c[2:] = np.conj(m.z0)
            c[1:] = np.cumprod(c[1:])
    return PowerSeries(c * m.phase)


def blaschke_series(b: BlaschkeProduct, N: int = DEFAULT_ORDER) -> PowerSeries:
    """Taylor prefix of a finite Blaschke product via products of Mobius factors."""
    out = mobius_series(MobiusMap(b.zeros[0], b.theta), N)
    for zj in b.zeros[1:]:
        out = mul(out, mobius_series(MobiusMap(zj), N))
    return out


def kernel_series(a: complex, N: int = DEFAULT_ORDER) -> PowerSeries:
    """``1/(1 - conj(a) z)``, the Szego kernel at ``a``."""
    return PowerSeries(np.conj(complex(a)) ** np.arange(N))


def _direct(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.convolve(a, b)[: len(a)]


def _fft(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = len(a)
    size = sfft.next_fast_len(2 * n - 1)
    return sfft.ifft(sfft.fft(a, size) * sfft.fft(b, size))[:n]


def mul(f: PowerSeries, g: PowerSeries, method: str = "auto") -> PowerSeries:
    """Truncated Cauchy product ``sum_{i<=k} f_i g_{k-i}``.

    ``method`` is ``"direct"``, ``"fft"`` or ``"auto"`` (FFT above
    ``FFT_THRESHOLD`` coefficients). FFT round-off is relative to
    ``max|f| * max|g|``, not to each output coefficient; use ``"direct"`` when
    small coefficients must survive next to very large ones.
    """
    f._check(g)
    if method not in ("auto", "direct", "fft"):
        raise ValueError(f"unknown method {method!r}")
    N = f.order
    # leading zeros are structural: keep them exactly zero instead of FFT noise
    vf, vg = _valuation(f.coeffs), _valuation(g.coeffs)
    out = np.zeros(N, np.complex128)
    v = vf + vg
    if v >= N:
        return PowerSeries(out)
    a, b = f.coeffs[vf : N - vg], g.coeffs[vg : N - vf]
    if not np.any(a[1:]):
        out[v:] = a[0] * b
        return PowerSeries(out)
    if not np.any(b[1:]):
        out[v:] = b[0] * a
        return PowerSeries(out)
    if method == "auto":
        method = "fft" if len(a) > FFT_THRESHOLD else "direct"
    out[v:] = _direct(a, b) if method == "direct" else _fft(a, b)
    return PowerSeries(out)


def _valuation(c: np.ndarray) -> int:
    nz = np.flatnonzero(c)
    return int(nz[0]) if len(nz) else len(c)


def power(f: PowerSeries, n: int) -> PowerSeries:
    """``f**n`` by binary powering of truncated products."""
    if n < 0:
        raise ValueError("negative powers: use reciprocal")
    result = PowerSeries.one(f.order)
    base = f
    while n:
        if n & 1:
            result = mul(result, base)
        n >>= 1
        if n:
            base = mul(base, base)
    return result


def powers(f: PowerSeries, count: int) -> list[PowerSeries]:
    """``[f**0, f**1, ..., f**(count-1)]`` by repeated multiplication."""
    out = [PowerSeries.one(f.order)]
    for _ in range(count - 1):
        out.append(mul(out[-1], f))
    return out[:count]


def _horner(f: PowerSeries, g: PowerSeries) -> PowerSeries:
    c = f.coeffs
    acc = PowerSeries.monomial(0, g.order, c[-1])
    for ck in c[-2::-1]:
        acc = mul(acc, g) + ck
    return acc


def compose(f: PowerSeries, g: PowerSeries) -> PowerSeries:
    """Formal composition ``f(g(z))``; requires ``g(0) = 0``.

    Only the first ``k`` terms of ``f`` reach coefficient ``k`` when
    ``g(0) = 0``, so the result is an exact prefix.
    """
    f._check(g)
    if abs(g.coeffs[0]) != 0:
        raise ValueError(
            "compose needs an inner series with g(0) = 0; "
            "use compose_with_mobius for disk automorphisms"
        )
    return _horner(f, g)


def compose_with_mobius(f: PowerSeries, m: MobiusMap) -> PowerSeries:
    """``sum_{k<N} f_k phi^k`` with ``phi`` the closed-form Mobius series.

    Every power of ``phi`` is exact to order ``N``; what is dropped is the
    tail ``sum_{k>=N} f_k phi^k``, bounded by ``sum_{k>=N} |f_k|`` in sup norm
    (see :func:`tail_estimate`). Inputs should decay geometrically.
    """
    return _horner(f, mobius_series(m, f.order))


def tail_estimate(f: PowerSeries) -> float:
    """Estimate of ``sum_{k>=N} |f_k|`` from the geometric decay of the last quarter.

    Returns ``inf`` when the coefficients do not visibly decay.
    """
    a = np.abs(f.coeffs)
    n = len(a)
    if n < 8:
        return 0.0 if np.all(a == 0) else math.inf
    seg = a[3 * n // 4 :]
    if np.all(seg == 0):
        return 0.0
    nz = seg > 0
    ks = np.arange(3 * n // 4, n)[nz]
    if len(ks) < 2:
        return float(seg.max())
    slope, icpt = np.polyfit(ks, np.log(seg[nz]), 1)
    # envelope: shift the fit up so it dominates every sampled point
    icpt += max(0.0, float(np.max(np.log(seg[nz]) - (slope * ks + icpt))))
    if slope >= 0:
        return math.inf
    r = math.exp(slope)
    return float(math.exp(icpt + slope * n) / (1 - r))


def _log_scaled(seq: WeightSequence, n: int):
    lb = seq.log_betas(n)
    b = seq.betas(n)
    if np.all(np.isfinite(b)) and b.max() < 1e300 and b.min() > 1e-300:
        return b, None
    return None, lb


def weighted_inner(f: PowerSeries, g: PowerSeries, seq: WeightSequence) -> complex:
    """``<f, g> = sum_k beta_k^2 conj(g_k) f_k`` over the stored coefficients."""
    f._check(g)
    b, lb = _log_scaled(seq, f.order)
    prod = np.conj(g.coeffs) * f.coeffs
    if b is not None:
        return complex(np.sum(b**2 * prod))
    nz = prod != 0
    if not np.any(nz):
        return 0j
    s = float(np.max(2 * lb[nz]))
    with np.errstate(under="ignore"):
        val = np.sum(np.exp(2 * lb[nz] - s) * prod[nz])
    return complex(val * math.exp(s)) if s < 709 else complex(val) * math.inf


def log_weighted_norm(f: PowerSeries, seq: WeightSequence) -> float:
    """``log ||f||_beta`` computed entirely in the log domain."""
    lb = seq.log_betas(f.order)
    a = np.abs(f.coeffs)
    nz = a > 0
    if not np.any(nz):
        return -math.inf
    t = lb[nz] + np.log(a[nz])
    s = float(t.max())
    with np.errstate(under="ignore"):
        return s + 0.5 * math.log(float(np.sum(np.exp(2 * (t - s)))))


def weighted_norm(f: PowerSeries, seq: WeightSequence) -> float:
    """``||f||_beta``; switches to the log domain when ``beta`` leaves the float range."""
    b, _ = _log_scaled(seq, f.order)
    if b is not None:
        return float(np.sqrt(np.sum(b**2 * np.abs(f.coeffs) ** 2)))
    lg = log_weighted_norm(f, seq)
    return math.exp(lg) if lg < 709 else math.inf


def derivative(f: PowerSeries) -> PowerSeries:
    """``f'`` at the same order (top coefficient becomes 0)."""
    c = f.coeffs
    out = np.zeros_like(c)
    out[:-1] = c[1:] * np.arange(1, len(c))
    return PowerSeries(out)


def reciprocal(f: PowerSeries) -> PowerSeries:
    """``1/f`` by Newton iteration ``r <- r (2 - f r)``, doubling precision each step."""
    c0 = f.coeffs[0]
    if abs(c0) <= 1e-12:
        raise ZeroDivisionError("reciprocal needs |f(0)| > 1e-12")
    N = f.order
    r = np.array([1.0 / c0], np.complex128)
    n = 1
    while n < N:
        n = min(2 * n, N)
        fr = _fft(f.coeffs[:n], np.concatenate([r, np.zeros(n - len(r))]))
        corr = _fft(np.concatenate([r, np.zeros(n - len(r))]), -fr)
        corr[0] += 2 * r[0]
        corr[1 : len(r)] += 2 * r[1:]
        r = corr
    return PowerSeries(r)


def eval_at(f: PowerSeries, z: complex) -> complex:
    """Horner evaluation of the truncated sum at a point."""
    return complex(np.polyval(f.coeffs[::-1], z))


def eval_circle(f: PowerSeries, M: int) -> np.ndarray:
    """Values at ``exp(2 pi i j / M)``, ``j = 0 .. M-1`` (inverse FFT of the padded coefficients)."""
    if M < f.order or M & (M - 1):
        raise ValueError("M must be a power of two >= order")
    return sfft.ifft(f.coeffs, M) * M


def power_derivative_alpha(t: float, alpha: float, N: int = DEFAULT_ORDER) -> PowerSeries:
    """Taylor prefix of ``(phi_t')^alpha`` for ``phi_t = (t - z)/(1 - t z)``.

    ``phi_t' = (t^2 - 1)(1 - t z)^{-2}``. The binomial series of
    ``(1 - t z)^{-2 alpha}`` is generated by the ratio recurrence
    ``c_{k+1} = c_k t (k + 2 alpha)/(k + 1)``; the constant uses the
    principal power of the negative real ``t^2 - 1``.
    """
    if not 0 < t < 1:
        raise ValueError("t must lie in (0, 1)")
    k = np.arange(N - 1, dtype=np.float64)
    ratios = t * (k + 2 * alpha) / (k + 1)
    c = np.empty(N)
    c[0] = 1.0
    # cumprod underflows harmlessly to 0 for long tails
    with np.errstate(under="ignore"):
        c[1:] = np.cumprod(ratios)
    front = (1 - t * t) ** alpha * cmath.exp(1j * math.pi * alpha)
    return PowerSeries(front * c)


def parse_symbol(text: str, N: int = DEFAULT_ORDER):
    """Parse ``poly:...``, ``mobius:re,im[,theta]`` or ``blaschke:re,im;re,im[,theta]``.

    Returns a :class:`PowerSeries`, :class:`MobiusMap` or :class:`BlaschkeProduct`.
    """
    name, _, body = text.strip().replace("−", "-").partition(":")
    name = name.lower()
    try:
        if name == "poly":
            vals = [complex(v.replace(" ", "")) for v in body.split(",")]
            return PowerSeries(vals, max(N, len(vals)))
        if name == "mobius":
            nums = [float(v) for v in body.split(",")]
            if len(nums) not in (2, 3):
                raise ValueError("mobius needs re,im[,theta]")
            return MobiusMap(complex(nums[0], nums[1]), nums[2] if len(nums) == 3 else 0.0)
        if name == "blaschke":
            groups = body.split(";")
            zeros = []
            theta = 0.0
            for i, grp in enumerate(groups):
                nums = [float(v) for v in grp.split(",")]
                if len(nums) == 3 and i == len(groups) - 1:
                    theta = nums[2]
                elif len(nums) != 2:
                    raise ValueError(f"bad zero {grp!r}")
                zeros.append(complex(nums[0], nums[1]))
            return BlaschkeProduct(tuple(zeros), theta)
    except ValueError as exc:
        raise ValueError(f"bad symbol spec {text!r}: {exc}") from None
    raise ValueError(f"bad symbol spec {text!r}")
