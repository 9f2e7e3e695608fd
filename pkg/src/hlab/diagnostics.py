"""Finite-truncation diagnostics: singular-value bounds, Riesz verdicts,
growth traces, the derivative-power norm bounds, boundedness transfer and
Fredholm indices.

Every verdict here is evidence gathered at finite truncation, never a proof.
Reports print their raw ladders so thresholds cannot hide data.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.linalg import svdvals

from .operators import gram, scale_ratios, transformation_matrix
from .series import (
    BlaschkeProduct,
    MobiusMap,
    PowerSeries,
    blaschke_series,
    derivative,
    eval_circle,
    kernel_series,
    log_weighted_norm,
    mobius_series,
    mul,
    power_derivative_alpha,
    powers,
)
from .weights import WeightSequence, bergman, lift

__all__ = [
    "SingularBounds",
    "Verdict",
    "RieszReport",
    "GrowthTrace",
    "singular_bounds",
    "capture_columns",
    "conjugated_bounds",
    "riesz_verdict",
    "riesz_blaschke_family",
    "mobius_family",
    "blaschke_family",
    "growth_trace",
    "dnlower_bound",
    "dnlower_check",
    "blower_check",
    "cowen_transfer_check",
    "cpb_gram_check",
    "fredholm_index",
    "winding_number",
]

CAPTURE_TOL = 1e-8
MAX_GRID = 2**20


@dataclass(frozen=True)
class SingularBounds:
    """Extreme singular values of a leading block.

    ``sigma_max`` comes from the ``rows x cols`` block; when ``min_cols`` is
    set, ``sigma_min`` comes from the narrower ``rows x min_cols`` block.
    """

    sigma_max: float
    sigma_min: float
    rows: int
    cols: int
    min_cols: int | None = None

    def to_dict(self) -> dict:
        return {
            "sigma_max": self.sigma_max,
            "sigma_min": self.sigma_min,
            "rows": self.rows,
            "cols": self.cols,
            "min_cols": self.min_cols,
        }


def singular_bounds(X: np.ndarray, rows: int, cols: int) -> SingularBounds:
    """Largest and smallest singular value of ``X[:rows, :cols]`` (``rows >= cols``)."""
    if rows < cols:
        raise ValueError("rows must be >= cols")
    if rows > X.shape[0] or cols > X.shape[1]:
        raise ValueError("block exceeds the matrix")
    s = svdvals(X[:rows, :cols])
    return SingularBounds(float(s[0]), float(s[-1]), rows, cols)


def capture_columns(Y: np.ndarray, N: int, tol: float = CAPTURE_TOL) -> int:
    """Number of leading columns whose energy below row ``N`` is at most ``tol``.

    ``Y`` must extend past row ``N``. A column whose image spills beyond the
    retained rows would make the smallest singular value of the truncation
    collapse for reasons that have nothing to do with the operator.
    """
    Y = Y[:, :N]
    total = np.sum(np.abs(Y) ** 2, axis=0)
    tail = np.sum(np.abs(Y[N:]) ** 2, axis=0)
    bad = np.nonzero(tail > tol * total)[0]
    return max(1, int(bad[0])) if len(bad) else Y.shape[1]


def conjugated_bounds(Y: np.ndarray, N: int, tol: float = CAPTURE_TOL) -> SingularBounds:
    """Norm and lower-bound estimates for an operator given by a tall matrix ``Y``.

    ``sigma_max`` is taken on the square ``N x N`` block: any compression
    underestimates the norm and the estimate is nondecreasing in ``N``.
    ``sigma_min`` is taken on ``N x c`` where ``c`` counts the captured
    columns (:func:`capture_columns`).
    """
    smax = float(svdvals(Y[:N, :N])[0])
    c = capture_columns(Y, N, tol)
    smin = float(svdvals(Y[:N, :c])[-1])
    return SingularBounds(smax, smin, N, N, c)


class Verdict(str, enum.Enum):
    RIESZ = "RieszEvidence"
    NOT_LOWER_BOUNDED = "NotLowerBounded"
    NOT_BOUNDED = "NotBounded"
    INCONCLUSIVE = "Inconclusive"


@dataclass
class RieszReport:
    ladder: list[tuple[int, SingularBounds]]
    verdict: Verdict
    tolerance: float
    plateau: float = 0.05
    collapse: float = 0.25
    family: str = ""
    weight: str = ""

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "weight": self.weight,
            "verdict": self.verdict.value,
            "tolerance": self.tolerance,
            "plateau": self.plateau,
            "collapse": self.collapse,
            "ladder": [{"N": n, **b.to_dict()} for n, b in self.ladder],
        }

    def csv_rows(self):
        yield ("N", "sigma_max", "sigma_min")
        for n, b in self.ladder:
            yield (n, b.sigma_max, b.sigma_min)


def _verdict(bounds: list[SingularBounds], tol: float, plateau: float, collapse: float) -> Verdict:
    if len(bounds) < 2:
        return Verdict.INCONCLUSIVE
    smax = [b.sigma_max for b in bounds]
    smin = [b.sigma_min for b in bounds]
    if (
        smax[-1] < (1 + plateau) * smax[-2]
        and smin[-1] > (1 - plateau) * smin[-2]
        and smin[-1] > tol
    ):
        return Verdict.RIESZ
    if smin[-1] < tol and all(b <= (1 - collapse) * a for a, b in zip(smin, smin[1:])):
        return Verdict.NOT_LOWER_BOUNDED
    if all(b >= (1 + collapse) * a for a, b in zip(smax, smax[1:])):
        return Verdict.NOT_BOUNDED
    return Verdict.INCONCLUSIVE


def _map(fn, items, workers: int | None):
    if workers and workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            return list(ex.map(fn, items))
    return [fn(x) for x in items]


def riesz_verdict(
    F,
    seq: WeightSequence,
    ladder,
    tol: float = 1e-2,
    *,
    norm_index=None,
    plateau: float = 0.05,
    collapse: float = 0.25,
    capture_tol: float = CAPTURE_TOL,
    workers: int | None = None,
    family: str = "",
) -> RieszReport:
    """Ladder test of ``D_beta X_F D_beta^{-1}`` for boundedness and lower boundedness.

    ``F`` is a list of at least ``max(ladder)`` series; series orders beyond
    each rung ``N`` (ideally ``2N``) are used to decide which columns are
    fully captured. Column ``j`` is normalized by ``beta_{norm_index[j]}``
    (default ``j``), i.e. the family tested is ``f_j / beta_{norm_index[j]}``.

    Verdicts: RieszEvidence when both extremes drift by less than
    ``plateau`` over the last rung and ``sigma_min > tol``; NotLowerBounded
    when ``sigma_min`` ends below ``tol`` after falling by at least
    ``collapse`` per rung; NotBounded when ``sigma_max`` grows by at least
    ``collapse`` per rung; otherwise Inconclusive.
    """
    ladder = [int(n) for n in ladder]
    if any(b <= a for a, b in zip(ladder, ladder[1:])):
        raise ValueError("ladder must be strictly increasing")
    top = ladder[-1]
    if len(F) < top:
        raise ValueError(f"family has {len(F)} members, ladder needs {top}")
    idx = np.arange(top) if norm_index is None else np.asarray(norm_index)[:top]
    order = min(f.order for f in F[:top])

    def rung(N):
        rows = min(order, 2 * N)
        if rows < N:
            raise ValueError(f"series order {order} < rung {N}")
        X = transformation_matrix(F, N, rows)
        Y = X * scale_ratios(seq, rows, N, idx[:N])
        return conjugated_bounds(Y, N, capture_tol)

    bounds = _map(rung, ladder, workers)
    verdict = _verdict(bounds, tol, plateau, collapse)
    return RieszReport(list(zip(ladder, bounds)), verdict, tol, plateau, collapse, family, seq.spec)


def mobius_family(m: MobiusMap, count: int, order: int) -> list[PowerSeries]:
    """``[phi^0, ..., phi^(count-1)]`` to the given order."""
    return powers(mobius_series(m, order), count)


def blaschke_family(b: BlaschkeProduct, count: int, order: int):
    """Interleaved ``B^n / (1 - conj(z_j) z)``, column ``n*m + j``.

    Returns ``(series_list, norm_index)`` with ``norm_index[n*m + j] = n``.
    """
    m = b.order
    nmax = -(-count // m)
    B = blaschke_series(b, order)
    kernels = [kernel_series(zj, order) for zj in b.zeros]
    F, idx = [], []
    Bn = PowerSeries.one(order)
    for n in range(nmax):
        for j in range(m):
            F.append(mul(Bn, kernels[j]))
            idx.append(n)
        Bn = mul(Bn, B)
    return F[:count], np.array(idx[:count])


def check_distinct(b: BlaschkeProduct, sep: float = 1e-6) -> None:
    if b.min_zero_separation() <= sep:
        raise ValueError(
            "Blaschke zeros must be pairwise distinct (separation > 1e-6); "
            "families with repeated zeros are only total, not of this interleaved form"
        )


def riesz_blaschke_family(
    b: BlaschkeProduct, seq: WeightSequence, ladder, tol: float = 1e-2, **kw
) -> RieszReport:
    """Riesz test of ``{B^n/(beta_n (1 - conj(z_j) z))}`` ordered by ``n`` then ``j``."""
    check_distinct(b)
    top = max(ladder)
    F, idx = blaschke_family(b, top, 2 * top)
    return riesz_verdict(F, seq, ladder, tol, norm_index=idx, family=b.spec, **kw)


@dataclass
class GrowthTrace:
    """Ratios ``r_n = ||phi^n||_beta / beta_n`` (stored with their logs)."""

    n: list[int]
    log_r: list[float]
    symbol: str
    weight: str

    @property
    def r(self) -> list[float]:
        return [math.exp(v) if v < 709 else math.inf for v in self.log_r]

    def to_dict(self) -> dict:
        return {
            "symbol": self.symbol,
            "weight": self.weight,
            "pairs": [
                {"n": n, "r": r, "log_r": lr} for n, r, lr in zip(self.n, self.r, self.log_r)
            ],
        }

    def csv_rows(self):
        yield ("n", "r_n", "log_r_n")
        for n, r, lr in zip(self.n, self.r, self.log_r):
            yield (n, r, lr)


def growth_trace(m: MobiusMap, seq: WeightSequence, n_list, N: int) -> GrowthTrace:
    """``||phi^n||_beta / ||z^n||_beta`` for each ``n`` in ``n_list`` (log domain)."""
    n_list = [int(n) for n in n_list]
    if N < 4 * max(n_list):
        raise ValueError(f"need N >= 4 * max(n) = {4 * max(n_list)}")
    phi = mobius_series(m, N)
    lb = seq.log_betas(N)
    want = set(n_list)
    found = {}
    p = PowerSeries.one(N)
    for n in range(max(n_list) + 1):
        if n in want:
            found[n] = 0.0 if n == 0 else log_weighted_norm(p, seq) - float(lb[n])
        if n < max(n_list):
            p = mul(p, phi)
    return GrowthTrace(n_list, [found[n] for n in n_list], m.spec, seq.spec)


def dnlower_bound(t: float, alpha: float) -> float:
    """``(1+t)^a / ((1-t)^(a-1) sqrt(2 pi (2a-1)))``; needs ``a > 1/2``."""
    if not alpha > 0.5:
        raise ValueError("the bound degenerates at alpha = 1/2; need alpha > 1/2")
    return (1 + t) ** alpha / ((1 - t) ** (alpha - 1) * math.sqrt(2 * math.pi * (2 * alpha - 1)))


def dnlower_check(t: float, alpha: float, N: int = 8192) -> dict:
    """Compare ``||(phi_t')^alpha||_{H^2}`` with its closed-form lower bound."""
    bound = dnlower_bound(t, alpha)
    c = power_derivative_alpha(t, alpha, N).coeffs
    norm = float(np.sqrt(np.sum(np.abs(c) ** 2)))
    return {"t": t, "alpha": alpha, "N": N, "norm": norm, "bound": bound, "pass": norm >= bound}


def blower_check(t: float, alpha: float, n: int, N: int) -> dict:
    """``||phi_t^n||_{A_alpha} / beta_n`` against ``||(phi_t')^alpha||_{H^2} / 2``.

    The inequality is asymptotic in ``n``; ``pass`` only records the outcome.
    """
    tr = growth_trace(MobiusMap(t), bergman(alpha), [n], N)
    lhs = tr.r[0]
    c = power_derivative_alpha(t, alpha, N).coeffs
    rhs = 0.5 * float(np.sqrt(np.sum(np.abs(c) ** 2)))
    return {"t": t, "alpha": alpha, "n": n, "N": N, "lhs": lhs, "rhs": rhs, "pass": lhs >= rhs}


def composition_matrix(psi: PowerSeries, N: int, rows: int | None = None) -> np.ndarray:
    """Columns ``psi^0 .. psi^(N-1)``; needs ``psi.order >= rows``."""
    rows = N if rows is None else rows
    return transformation_matrix(powers(psi.with_order(rows), N), N, rows)


def cowen_transfer_check(
    psi: PowerSeries, seq_a: WeightSequence, seq_b: WeightSequence, N: int
) -> dict:
    """Norm ordering of ``C_psi`` on two spaces with dominated weights.

    Requires ``psi(0) = 0`` and ``w_k(a) >= w_k(b)`` for ``k <= N``; then the
    estimate on ``a`` dominates the one on ``b`` (to ``1e-8``).
    """
    if abs(psi.coeffs[0]) > 1e-14:
        raise ValueError("psi(0) must vanish")
    k = np.arange(1, N + 1)
    wa, wb = seq_a.w(k), seq_b.w(k)
    if np.any(wa < wb * (1 - 1e-14)):
        bad = int(k[np.argmax(wa < wb * (1 - 1e-14))])
        raise ValueError(f"weight domination fails at k = {bad}: w_a < w_b")
    C = composition_matrix(psi, N)
    norms = []
    for seq in (seq_a, seq_b):
        Y = C * scale_ratios(seq, N, N)
        norms.append(float(svdvals(Y)[0]))
    return {
        "weight_a": seq_a.spec,
        "weight_b": seq_b.spec,
        "N": N,
        "norm_a": norms[0],
        "norm_b": norms[1],
        "pass": norms[0] >= norms[1] - 1e-8,
    }


def cpb_gram_check(psi: PowerSeries, seq: WeightSequence, count: int) -> dict:
    """Gram identity behind the ``beta~ = (n+1) beta`` transfer.

    Left: Gram of ``psi^{n+1} / beta~_n`` in the lifted space. Right: Gram of
    ``D D_w M_{psi'} (psi^n / beta_n)`` in the original space plus the rank-one
    term built from ``psi(0)``. Returns the largest entrywise deviation.
    """
    N = psi.order
    lifted = lift(seq)
    pw = powers(psi, count + 1)
    lb = seq.log_betas(N + 1)
    llb = lifted.log_betas(N + 1)
    left = [pw[n + 1] * math.exp(-llb[n]) for n in range(count)]
    dpsi = derivative(psi)
    k = np.arange(N)
    scale = (k + 2) / (k + 1) * seq.w(k + 1)
    right = [
        PowerSeries(scale * mul(dpsi, pw[n]).coeffs * math.exp(-lb[n])) for n in range(count)
    ]
    G_left = gram(left, lifted)
    G_right = gram(right, seq)
    z0 = complex(psi.coeffs[0])
    # constant-term contribution <psi^{i+1}(0)/beta~_i, psi^{j+1}(0)/beta~_j>
    v = z0 ** np.arange(1, count + 1) * np.exp(-llb[:count])
    rank1 = np.conj(v)[:, None] * v[None, :]
    dev = float(np.max(np.abs(G_left - G_right - rank1)))
    return {"weight": seq.spec, "count": count, "N": N, "deviation": dev}


def winding_number(values: np.ndarray) -> tuple[float, float]:
    """Total phase change / 2 pi and the largest single increment, over a closed sample."""
    ratios = np.roll(values, -1) / values
    inc = np.angle(ratios)
    return float(np.sum(inc) / (2 * math.pi)), float(np.max(np.abs(inc)))


def fredholm_index(f: PowerSeries, lam: complex = 0.0, M: int | None = None) -> int:
    """Index of ``M_{f - lambda}``: minus the winding number of ``f - lambda`` on the circle.

    The grid doubles from ``M`` (default: smallest power of two
    ``>= 4 * order``) until every phase increment is below ``pi/2``.
    """
    if M is None:
        M = 1 << max(2, (4 * f.order - 1).bit_length())
    if M & (M - 1) or M < 4 * f.order:
        raise ValueError("M must be a power of two >= 4 * order")
    while True:
        vals = eval_circle(f, M) - lam
        if np.min(np.abs(vals)) <= 1e-6:
            raise ValueError("lambda lies (numerically) on the boundary curve")
        wn, step = winding_number(vals)
        if step < math.pi / 2:
            break
        M *= 2
        if M > MAX_GRID:
            raise ValueError("phase increments stay >= pi/2 up to the grid cap")
    k = round(wn)
    if abs(wn - k) >= 1e-3:
        raise ValueError(f"winding number {wn} is not near an integer")
    return -int(k)
