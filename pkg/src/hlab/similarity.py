"""Explicit similarity intertwiners and the identities behind them.

Two intertwiners are built as matrices:

* the composition operator ``C_phi`` (columns ``phi^n``), which satisfies
  ``C_phi M_z = M_phi C_phi`` coefficient for coefficient;
* the Blaschke intertwiner ``X`` sending ``z^n/beta_n`` in copy ``j`` of
  ``H^2_beta (+) ... (+) H^2_beta`` to ``B^n / (beta_n (1 - conj(z_j) z))``,
  which satisfies ``X (+)M_z = M_B X``.

Residuals are relative Frobenius norms and always travel with the name of
the region they were measured on.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as P

from .diagnostics import SingularBounds, blaschke_family, check_distinct, conjugated_bounds
from .operators import mult_matrix, scale_ratios, transformation_matrix
from .series import (
    BlaschkeProduct,
    MobiusMap,
    PowerSeries,
    blaschke_series,
    compose,
    compose_with_mobius,
    kernel_series,
    mobius_series,
    mul,
    power,
    powers,
    reciprocal,
)
from .weights import WeightSequence

__all__ = [
    "IntertwinerReport",
    "composition_intertwiner",
    "blaschke_intertwiner",
    "verify_inner_identities",
    "mobius_power_expand",
    "reconstruct",
    "expansion_residual",
    "check_h_circ_B",
    "simple_zero_reduction",
    "relative_residual",
]


@dataclass
class IntertwinerReport:
    """Outcome of an intertwining check.

    ``residual`` is measured on ``region``; ``full_residual`` on the whole
    square compression, truncation edge included.
    """

    residual: float
    invertibility: SingularBounds
    N: int
    region: str
    full_residual: float = math.nan
    symbol: str = ""
    weight: str = ""
    matrix: np.ndarray | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        return {
            "symbol": self.symbol,
            "weight": self.weight,
            "N": self.N,
            "residual": self.residual,
            "region": self.region,
            "full_residual": self.full_residual,
            "invertibility": self.invertibility.to_dict(),
        }


def relative_residual(L: np.ndarray, R: np.ndarray, X: np.ndarray, A: np.ndarray) -> float:
    """``||L - R||_F / (||X||_F ||A||_F)``."""
    denom = np.linalg.norm(X) * np.linalg.norm(A)
    return float(np.linalg.norm(L - R) / denom) if denom else 0.0


def composition_intertwiner(m: MobiusMap, seq: WeightSequence, N: int) -> IntertwinerReport:
    """Check ``C_phi M_z = M_phi C_phi`` and estimate the bounds of ``D C_phi D^{-1}``.

    The residual covers columns ``0 .. N-2``; the last column of ``C_phi M_z``
    would need ``phi^N``, which the compression lacks.
    """
    rows = 2 * N
    phi = mobius_series(m, rows)
    Phi = transformation_matrix(powers(phi, N), N, rows)
    sq = Phi[:N]
    Mz = mult_matrix(PowerSeries.monomial(1, N), N)
    left = sq @ Mz
    right = mult_matrix(phi, N) @ sq
    exact = slice(0, N - 1)
    res = relative_residual(left[:, exact], right[:, exact], sq, Mz)
    full = relative_residual(left, right, sq, Mz)
    Y = Phi * scale_ratios(seq, rows, N)
    return IntertwinerReport(
        res,
        conjugated_bounds(Y, N),
        N,
        f"columns 0..{N - 2}",
        full,
        m.spec,
        seq.spec,
        Y[:N],
    )


def blaschke_intertwiner(b: BlaschkeProduct, seq: WeightSequence, N: int) -> IntertwinerReport:
    """Check ``X (+)M_z = M_B X`` for the interleaved Blaschke intertwiner.

    Column ``n*m + j`` of ``X`` is ``B^n / (beta_n (1 - conj(z_j) z))``. In
    orthonormal coordinates ``(+)M_z`` maps column ``c`` to ``c + m`` with
    weight ``w_{n+1}``. The residual is taken on the leading ``ceil(0.9 N)``
    square; the last ``m`` columns of ``X (+)M_z`` are truncated away.
    """
    check_distinct(b)
    m = b.order
    cols = m * -(-N // m)
    rows = 2 * N
    F, idx = blaschke_family(b, cols, rows)
    raw = transformation_matrix(F, cols, rows)
    lb = seq.log_betas(rows)
    X = raw[:N] * np.exp(-lb[idx])[None, :]
    A = np.zeros((cols, cols))
    c = np.arange(cols - m)
    A[c + m, c] = seq.w(idx[c] + 1)
    left = X @ A
    right = mult_matrix(blaschke_series(b, N), N) @ X
    k = math.ceil(0.9 * N)
    res = relative_residual(left[:k, :k], right[:k, :k], X, A)
    full = relative_residual(left[:, :N], right[:, :N], X, A)
    Y = raw * scale_ratios(seq, rows, cols, idx)
    return IntertwinerReport(
        res,
        conjugated_bounds(Y, N),
        N,
        f"leading {k}x{k} block",
        full,
        b.spec,
        seq.spec,
        Y[:N, :N],
    )


def verify_inner_identities(z0: complex, i: int, j: int, N: int = 1024) -> list[dict]:
    """The three ``H^2`` inner products of ``kappa B^i`` and ``kappa B^j`` with ``B = z phi``.

    ``kappa = sqrt(1-|z0|^2)/(1 - conj(z0) z)``. Expected values are
    ``delta_ij``, ``delta_ij`` and ``z0 delta_ij``.
    """
    z0 = complex(z0)
    phi = mobius_series(MobiusMap(z0), N)
    B = mul(PowerSeries.monomial(1, N), phi)
    kappa = kernel_series(z0, N) * math.sqrt(1 - abs(z0) ** 2)
    fi, fj = mul(kappa, power(B, i)), mul(kappa, power(B, j))
    z = PowerSeries.monomial(1, N)
    zi, zj = mul(z, fi), mul(z, fj)
    d = 1.0 if i == j else 0.0
    out = []
    for name, f, g, want in (
        ("<kB^i,kB^j>", fi, fj, d),
        ("<zkB^i,zkB^j>", zi, zj, d),
        ("<zkB^i,kB^j>", zi, fj, z0 * d),
    ):
        val = complex(np.vdot(g.coeffs, f.coeffs))
        out.append({"identity": name, "value": val, "expected": complex(want), "dev": abs(val - want)})
    return out


def mobius_power_expand(f: PowerSeries, m: MobiusMap) -> np.ndarray:
    """Coefficients ``lambda_k`` with ``f = sum_k lambda_k phi^k``.

    ``phi`` is an involution, so ``lambda`` is the Taylor sequence of ``f o phi``.
    """
    return compose_with_mobius(f, m).coeffs.copy()


def reconstruct(lam, m: MobiusMap) -> PowerSeries:
    """``sum_k lambda_k phi^k`` truncated to ``len(lam)`` coefficients."""
    return compose_with_mobius(PowerSeries(lam), m)


def expansion_residual(f: PowerSeries, m: MobiusMap) -> tuple[np.ndarray, float]:
    """``lambda`` and ``||f - sum lambda_k phi^k||_{H^2} / ||f||_{H^2}``."""
    lam = mobius_power_expand(f, m)
    g = reconstruct(lam, m)
    nf = np.linalg.norm(f.coeffs)
    res = np.linalg.norm(f.coeffs - g.coeffs)
    return lam, float(res / nf) if nf else float(res)


def _polys(b: BlaschkeProduct):
    """Ascending coefficient arrays of ``P`` and ``Q`` with ``B = P / Q``."""
    num, den = np.array([cmath.exp(1j * b.theta)]), np.array([1.0 + 0j])
    for zj in b.zeros:
        num = P.polymul(num, [zj, -1.0])
        den = P.polymul(den, [1.0, -np.conj(zj)])
    return num, den


def simple_zero_reduction(b: BlaschkeProduct, sep: float = 1e-3, grid: int = 16):
    """Find ``a`` with ``phi_a o B`` having pairwise distinct zeros.

    The zeros of ``phi_a o B`` are the roots of ``P - a Q``. Candidates ``a``
    are scanned on a polar grid, smallest modulus first. Returns
    ``(a, reduced)`` where ``reduced`` is the Blaschke product ``phi_a o B``
    (phase fixed by evaluation), so ``B = phi_a o reduced``.
    """
    if b.min_zero_separation() > sep:
        return 0j, b
    num, den = _polys(b)
    cands = [0j] + [
        r * cmath.exp(2j * math.pi * (k + 0.5 * (ri % 2)) / grid)
        for ri, r in enumerate(np.linspace(0.05, 0.9, grid))
        for k in range(grid)
    ]
    for a in cands:
        roots = P.polyroots(P.polysub(num, a * den))
        if len(roots) != b.order or np.any(np.abs(roots) >= 1):
            continue
        trial = BlaschkeProduct(tuple(roots))
        if trial.min_zero_separation() <= sep:
            continue
        zt = 0.37 + 0.21j
        target = MobiusMap(a)(b(zt))
        phase = complex(target / trial(zt))
        return a, BlaschkeProduct(tuple(roots), cmath.phase(phase))
    raise ValueError("no Mobius shift separates the zeros on the search grid")


def check_h_circ_B(f: PowerSeries, h: PowerSeries, b: BlaschkeProduct, N: int | None = None) -> dict:
    """Max coefficient deviation ``|f - h o B|`` on the first ``N`` coefficients.

    With ``B(0) = 0`` the composition is formal and exact. Otherwise, for
    ``a = B(0)``, ``h o B = (h o phi_a) o (phi_a o B)`` and ``phi_a o B``
    vanishes at 0; only ``h o phi_a`` carries a truncation tail.
    """
    N = f.order if N is None else N
    f = f.with_order(N)
    h = h.with_order(N)
    B = blaschke_series(b, N)
    a = complex(B.coeffs[0])
    if a == 0:
        hb = compose(h, B)
        path = "formal"
    else:
        inner = mul(a - B, reciprocal(1 - np.conj(a) * B))
        hb = compose(compose_with_mobius(h, MobiusMap(a)), inner)
        path = "mobius-shifted"
    dev = np.abs(f.coeffs - hb.coeffs)
    return {"residual": float(dev.max()), "N": N, "path": path, "B0": a}
