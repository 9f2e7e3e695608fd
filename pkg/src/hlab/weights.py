"""Weight sequences for weighted Hardy spaces.

A space is fixed by positive step ratios ``w_1, w_2, ...``; the monomial
norms are the running products ``beta_0 = 1``, ``beta_k = w_1 ... w_k``.
Every sequence memoizes ``beta`` and ``log(beta)`` together so that very
fast or very slow growth (``powerlog``, ``sobolev``) can be handled in the
log domain without overflow.
"""

from __future__ import annotations

import enum
import math
import threading
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "WeightSequence",
    "GrowthClass",
    "GrowthVerdict",
    "beta",
    "classify_growth",
    "invert",
    "lift",
    "parse_weight",
    "bergman",
    "dirichlet",
    "sobolev",
    "logrecip",
    "powerlog",
    "flipbergman",
    "constant",
    "tabulated",
]

KINDS = (
    "bergman",
    "dirichlet",
    "sobolev",
    "logrecip",
    "powerlog",
    "flipbergman",
    "constant",
    "tabulated",
    "inverse",
    "lift",
)

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


def _splitmix64(seed: int, idx: np.ndarray) -> np.ndarray:
    """SplitMix64 outputs number ``idx`` (1-based) for a 64-bit seed.

    The state after ``i`` steps is ``seed + i*gamma``, so the stream can be
    evaluated at arbitrary indices without walking it.
    """
    with np.errstate(over="ignore"):
        x = np.uint64(seed & 0xFFFFFFFFFFFFFFFF) + idx.astype(np.uint64) * _GAMMA
        x = (x ^ (x >> np.uint64(30))) * _M1
        x = (x ^ (x >> np.uint64(27))) * _M2
        x = x ^ (x >> np.uint64(31))
    return x


def flip_signs(seed: int, k) -> np.ndarray:
    """Deterministic signs ``eps_k`` in {-1, +1} (top bit of the k-th draw)."""
    k = np.asarray(k, dtype=np.int64)
    top = _splitmix64(seed, k) >> np.uint64(63)
    return np.where(top == 1, 1.0, -1.0)


@dataclass(frozen=True)
class WeightSequence:
    """Immutable descriptor of a weight sequence.

    Use the module constructors (:func:`bergman`, :func:`powerlog`, ...)
    rather than building instances by hand. ``base`` is only set for the
    derived kinds ``inverse`` and ``lift``.
    """

    kind: str
    param: float | None = None
    seed: int | None = None
    values: tuple[float, ...] | None = None
    base: WeightSequence | None = None
    _memo: dict = field(default_factory=dict, init=False, repr=False, compare=False)
    _lock: threading.Lock = field(
        default_factory=threading.Lock, init=False, repr=False, compare=False
    )

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown weight kind {self.kind!r}")
        if self.kind in ("bergman", "dirichlet", "flipbergman"):
            if self.param is None or self.param < 0:
                raise ValueError(f"{self.kind} needs a parameter >= 0")
        if self.kind == "flipbergman" and self.seed is None:
            raise ValueError("flipbergman needs a seed")
        if self.kind == "tabulated":
            if not self.values:
                raise ValueError("tabulated weights need at least one value")
            if any(not (v > 0 and math.isfinite(v)) for v in self.values):
                raise ValueError("tabulated weights must be finite and positive")
        if self.kind in ("inverse", "lift") and self.base is None:
            raise ValueError(f"{self.kind} needs a base sequence")

    # -- pointwise weights ------------------------------------------------

    def log_w(self, k) -> np.ndarray:
        """``log(w_k)`` for integer ``k >= 1`` (array-valued)."""
        k = np.asarray(k, dtype=np.float64)
        if np.any(k < 1):
            raise IndexError("weights are indexed from k = 1")
        kind = self.kind
        if kind == "constant":
            return np.zeros_like(k)
        if kind == "bergman":
            return -0.5 * np.log1p(2.0 * self.param / (k + 1.0))
        if kind == "dirichlet":
            return 0.5 * np.log1p(2.0 * self.param / (k + 1.0))
        if kind == "flipbergman":
            eps = flip_signs(self.seed, k.astype(np.int64))
            return -0.5 * eps * np.log1p(2.0 * self.param / (k + 1.0))
        if kind == "sobolev":
            return 0.5 * (np.log(k + 1.0) - np.log(3.0 * k**4 - k**2 + 2.0 * k + 1.0))
        if kind == "logrecip":
            # beta_k = 1/ln(k+1), beta_0 = 1; w_k = ln k / ln(k+1) for k >= 2
            ks = np.maximum(k, 2.0)
            out = -np.log1p(np.log1p(1.0 / ks) / np.log(ks))
            return np.where(k == 1, -np.log(np.log(2.0)), out)
        if kind == "powerlog":
            # ln^2(k+1) - ln^2(k) = log1p(1/k) * (ln(k+1) + ln k)
            return np.log1p(1.0 / k) * (np.log(k + 1.0) + np.log(k))
        if kind == "tabulated":
            n = len(self.values)
            if np.any(k > n):
                raise IndexError(
                    f"tabulated weights cover k <= {n}, asked for k = {int(k.max())}"
                )
            return np.log(np.asarray(self.values)[k.astype(np.int64) - 1])
        if kind == "inverse":
            return -self.base.log_w(k)
        if kind == "lift":
            return self.base.log_w(k) + np.log1p(1.0 / k)
        raise AssertionError(kind)

    def w(self, k) -> np.ndarray:
        """Step ratios ``w_k`` for integer ``k >= 1``."""
        k = np.asarray(k, dtype=np.float64)
        kind = self.kind
        if kind == "constant":
            if np.any(k < 1):
                raise IndexError("weights are indexed from k = 1")
            return np.ones_like(k)
        if kind == "bergman":
            if np.any(k < 1):
                raise IndexError("weights are indexed from k = 1")
            return np.sqrt((k + 1.0) / (k + 2.0 * self.param + 1.0))
        if kind == "dirichlet":
            if np.any(k < 1):
                raise IndexError("weights are indexed from k = 1")
            return np.sqrt((k + 2.0 * self.param + 1.0) / (k + 1.0))
        if kind == "sobolev":
            if np.any(k < 1):
                raise IndexError("weights are indexed from k = 1")
            return np.sqrt((k + 1.0) / (3.0 * k**4 - k**2 + 2.0 * k + 1.0))
        if kind == "tabulated":
            return np.exp(self.log_w(k))
        if kind == "inverse":
            return 1.0 / self.base.w(k)
        if kind == "lift":
            return self.base.w(k) * (k + 1.0) / k
        return np.exp(self.log_w(k))

    # -- cumulative products ----------------------------------------------

    def _extend(self, n: int) -> None:
        memo = self._memo
        if len(memo.get("beta", ())) >= n:
            return
        with self._lock:
            if "beta" not in memo:
                memo["log_beta"] = np.zeros(1)
                memo["beta"] = np.ones(1)
            limit = len(self.values) + 1 if self.kind == "tabulated" else None
            if limit is not None and n > limit:
                raise IndexError(f"tabulated weights cover beta_k for k <= {limit - 1}")
            # grow along fixed power-of-two boundaries so values never depend
            # on the order in which lengths were requested
            while len(memo["beta"]) < n:
                beta_arr, log_arr = memo["beta"], memo["log_beta"]
                have = len(beta_arr)
                cap = max(64, 2 * (have - 1)) + 1
                if limit is not None:
                    cap = min(cap, limit)
                k = np.arange(have, cap)
                with np.errstate(over="ignore", under="ignore"):
                    new_beta = beta_arr[-1] * np.cumprod(self.w(k))
                new_log = log_arr[-1] + np.cumsum(self.log_w(k))
                # swap in whole arrays so concurrent readers never see partial data
                memo["log_beta"] = np.concatenate([log_arr, new_log])
                memo["beta"] = np.concatenate([beta_arr, new_beta])

    def betas(self, n: int) -> np.ndarray:
        """``beta_0 .. beta_{n-1}``; entries may be ``inf``/0 past the float range."""
        self._extend(n)
        out = self._memo["beta"][:n]
        out.flags.writeable = False
        return out

    def log_betas(self, n: int) -> np.ndarray:
        """``log(beta_0) .. log(beta_{n-1})``, always finite."""
        self._extend(n)
        out = self._memo["log_beta"][:n]
        out.flags.writeable = False
        return out

    # -- descriptors -------------------------------------------------------

    @property
    def spec(self) -> str:
        """Canonical spec string (the CLI syntax plus ``inv(...)``/``lift(...)``)."""
        kind = self.kind
        if kind in ("bergman", "dirichlet"):
            return f"{kind}:{self.param:g}"
        if kind == "flipbergman":
            return f"flipbergman:{self.param:g}:{self.seed}"
        if kind == "tabulated":
            return f"tabulated[{len(self.values)}]"
        if kind == "inverse":
            return f"inv({self.base.spec})"
        if kind == "lift":
            return f"lift({self.base.spec})"
        return kind

    @property
    def flagged(self) -> bool:
        """True when the sequence does not satisfy ``w_k -> 1`` (the Sobolev formula)."""
        if self.kind == "sobolev":
            return True
        return self.base is not None and self.base.flagged

    def __str__(self) -> str:
        return self.spec


def bergman(alpha: float) -> WeightSequence:
    return WeightSequence("bergman", param=float(alpha))


def dirichlet(lam: float) -> WeightSequence:
    return WeightSequence("dirichlet", param=float(lam))


def sobolev() -> WeightSequence:
    return WeightSequence("sobolev")


def logrecip() -> WeightSequence:
    return WeightSequence("logrecip")


def powerlog() -> WeightSequence:
    return WeightSequence("powerlog")


def flipbergman(alpha: float, seed: int) -> WeightSequence:
    return WeightSequence("flipbergman", param=float(alpha), seed=int(seed))


def constant() -> WeightSequence:
    return WeightSequence("constant")


def tabulated(values) -> WeightSequence:
    return WeightSequence("tabulated", values=tuple(float(v) for v in values))


def beta(seq: WeightSequence, k: int) -> float:
    """Monomial norm ``||z^k|| = beta_k``."""
    if k < 0:
        raise IndexError("beta is indexed from k = 0")
    return float(seq.betas(k + 1)[k])


def invert(seq: WeightSequence) -> WeightSequence:
    """The reciprocal sequence ``1/w_k`` (so ``beta_k -> 1/beta_k``)."""
    if seq.kind == "constant":
        return seq
    if seq.kind == "inverse":
        return seq.base
    return WeightSequence("inverse", base=seq)


def lift(seq: WeightSequence) -> WeightSequence:
    """The sequence with ``beta~_n = (n+1) beta_n``."""
    return WeightSequence("lift", base=seq)


class GrowthClass(str, enum.Enum):
    POLYNOMIAL = "Polynomial"
    INTERMEDIATE_EVIDENCE = "IntermediateEvidence"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class GrowthVerdict:
    growth_class: GrowthClass
    empirical_sup: float
    analytic_bound: float | None
    window: int
    flagged: bool = False

    def to_dict(self) -> dict:
        return {
            "class": self.growth_class.value,
            "empirical_sup": self.empirical_sup,
            "analytic_bound": self.analytic_bound,
            "window": self.window,
            "flagged": self.flagged,
        }


def analytic_growth_bound(seq: WeightSequence) -> float | None:
    """Known value of ``sup_k (k+1)|w_k - 1|`` (as a limit), if any."""
    if seq.kind == "constant":
        return 0.0
    if seq.kind in ("bergman", "dirichlet", "flipbergman"):
        return seq.param
    if seq.kind == "inverse":
        return analytic_growth_bound(seq.base)
    return None


def growth_profile(seq: WeightSequence, window: int) -> np.ndarray:
    """``(k+1)|w_k - 1|`` for ``k = 1 .. window``."""
    k = np.arange(1, window + 1, dtype=np.float64)
    lw = seq.log_w(k)
    return (k + 1.0) * np.abs(np.expm1(lw))


def classify_growth(
    seq: WeightSequence, window: int, *, rise: float = 0.05
) -> GrowthVerdict:
    """Collect evidence on whether ``sup (k+1)|w_k - 1|`` is finite.

    Polynomial is reported when an analytic bound is known for the kind or
    when the running sup sets no new record over the final decade
    ``[window/10, window]``. A running sup that still rises by at least
    ``rise`` (relative) over that decade is reported as intermediate-growth
    evidence; anything else is inconclusive.
    """
    if window < 16:
        raise ValueError("window must be >= 16")
    prof = growth_profile(seq, window)
    running = np.maximum.accumulate(prof)
    sup = float(running[-1])
    lo = float(running[window // 10 - 1])
    bound = analytic_growth_bound(seq)
    if bound is not None or sup <= lo:
        cls = GrowthClass.POLYNOMIAL
    elif sup >= (1.0 + rise) * lo:
        cls = GrowthClass.INTERMEDIATE_EVIDENCE
    else:
        cls = GrowthClass.INCONCLUSIVE
    return GrowthVerdict(cls, sup, bound, window, seq.flagged)


def load_weight_file(path) -> WeightSequence:
    """One positive real per line: ``w_1, w_2, ...``; blank lines and ``#`` ignored."""
    vals = []
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            vals.append(float(line))
    return tabulated(vals)


def parse_weight(text: str) -> WeightSequence:
    """Parse ``bergman:1``, ``flipbergman:1:7``, ``file:w.txt``, ``powerlog`` ...

    The wrappers ``inv(...)`` and ``lift(...)`` emitted by :attr:`WeightSequence.spec`
    are accepted too, so every canonical spec parses back.
    """
    stripped = text.strip()
    for prefix, fn in (("inv(", invert), ("lift(", lift)):
        if stripped.lower().startswith(prefix) and stripped.endswith(")"):
            return fn(parse_weight(stripped[len(prefix) : -1]))
    name, _, rest = stripped.partition(":")
    name = name.lower()
    args = rest.split(":") if rest else []
    try:
        if name == "file":
            if not rest:
                raise ValueError("file: needs a path")
            return load_weight_file(rest)
        if name in ("bergman", "dirichlet") and len(args) == 1:
            return WeightSequence(name, param=float(args[0]))
        if name == "flipbergman" and len(args) == 2:
            return flipbergman(float(args[0]), int(args[1]))
        if name in ("sobolev", "logrecip", "powerlog", "constant") and not args:
            return WeightSequence(name)
    except ValueError as exc:
        raise ValueError(f"bad weight spec {text!r}: {exc}") from None
    raise ValueError(f"bad weight spec {text!r}")
