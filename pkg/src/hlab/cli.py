"""Command-line interface: ``hlab <command> [options]``.

Every command prints one ``hlab-report/1`` JSON document (stdout or
``--output``). Exit status: 0 success, 1 error (one line on stderr),
2 negative outcome (a failed check, or a verdict that differs from
``--expect``).

CSV columns written by ``--csv``:

  weights        k, w_k, beta_k
  series         k, re, im
  gram           i, j, re, im
  riesz          N, sigma_max, sigma_min
  growth         n, r_n, log_r_n
  dnlower        t, alpha, norm, bound, pass
  blower         t, alpha, n, lhs, rhs, pass
  intertwine     N, residual, full_residual, sigma_max, sigma_min
  expand         k, re, im
  bench          kernel, N, ns_per_op, reps

Options may also come from ``--config FILE``: flat ``key = value`` lines
(``#`` comments) using the long option names with ``-`` written as ``_``,
plus ``tol.NAME`` entries. Command-line flags win over the file.
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from dataclasses import dataclass, field, fields
from pathlib import Path

import jsonschema
import numpy as np

from . import report as rp
from .diagnostics import (
    blaschke_family,
    blower_check,
    check_distinct,
    cowen_transfer_check,
    dnlower_check,
    fredholm_index,
    growth_trace,
    mobius_family,
    riesz_blaschke_family,
    riesz_verdict,
)
from .operators import gram, gram_factored, mult_matrix, transformation_matrix
from .series import (
    BlaschkeProduct,
    MobiusMap,
    PowerSeries,
    _direct,
    _fft,
    blaschke_series,
    mobius_series,
    parse_symbol,
    powers,
    tail_estimate,
    weighted_norm,
)
from .similarity import (
    blaschke_intertwiner,
    check_h_circ_B,
    composition_intertwiner,
    expansion_residual,
)
from .weights import bergman, classify_growth, invert, lift, parse_weight

COMMANDS = (
    "weights", "series", "gram", "riesz", "growth", "dnlower", "blower",
    "cowen", "index", "intertwine", "expand", "compose-check", "bench",
)

TOL_DEFAULTS = {
    "riesz": 1e-2,  # sigma_min floor for a Riesz verdict
    "plateau": 0.05,  # allowed drift on the last rung
    "collapse": 0.25,  # per-rung change that counts as divergence
    "residual_mobius": 1e-12,
    "residual_blaschke": 1e-8,
    "compose": 1e-12,
    "expand": 1e-8,
    "bounded_ratio": 2.0,  # growth trace: max/min below this is Bounded
    "growth_ratio": 10.0,  # growth trace: last/first above this is Growing
    "agreement": 1e-10,  # bench: FFT vs naive, relative to max |c_k|
    "psd": 1e-10,  # gram: lambda_min >= -psd * lambda_max
}


class CliError(Exception):
    pass


# -- configuration ---------------------------------------------------------


def _ints(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _join(vals) -> str:
    return ",".join(repr(v) if isinstance(v, float) else str(v) for v in vals)


@dataclass
class ExperimentConfig:
    """Flat experiment description; ``None`` means "use the command default"."""

    command: str | None = None
    weight: str | None = None
    weight_b: str | None = None
    invert: bool = False
    lift: bool = False
    symbol: str | None = None
    f: str | None = None
    h: str | None = None
    ladder: list[int] | None = None
    n: list[int] | None = None
    t: list[float] | None = None
    alpha: list[float] | None = None
    lam: str | None = None
    order: int | None = None
    grid: int | None = None
    workers: int | None = None
    seed: int | None = None
    expect: str | None = None
    output: str | None = None
    csv: str | None = None
    dump_matrix: str | None = None
    no_meta: bool = False
    tolerances: dict[str, float] = field(default_factory=dict)

    _LISTS = {"ladder": (_ints, _join), "n": (_ints, _join), "t": (_floats, _join), "alpha": (_floats, _join)}
    _INTS = ("order", "grid", "workers", "seed")
    _BOOLS = ("invert", "lift", "no_meta")
    # config key "lambda" maps to the field "lam"
    _ALIASES = {"lambda": "lam"}

    @classmethod
    def from_text(cls, text: str) -> ExperimentConfig:
        cfg = cls()
        names = {f.name for f in fields(cls)} - {"tolerances"}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if not sep:
                raise CliError(f"config line {lineno}: expected key = value")
            if key.startswith("tol."):
                cfg.tolerances[key[4:]] = _tol_value(key[4:], value)
                continue
            key = cls._ALIASES.get(key, key)
            if key not in names:
                raise CliError(f"config line {lineno}: unknown key {key!r}")
            setattr(cfg, key, cls._convert(key, value))
        return cfg

    @classmethod
    def _convert(cls, key: str, value: str):
        try:
            if key in cls._LISTS:
                return cls._LISTS[key][0](value)
            if key in cls._INTS:
                return int(value)
            if key in cls._BOOLS:
                if value.lower() not in ("true", "false"):
                    raise ValueError(f"{key} must be true or false")
                return value.lower() == "true"
        except ValueError as exc:
            raise CliError(f"config key {key}: {exc}") from None
        return value

    def to_text(self) -> str:
        """Inverse of :meth:`from_text` (defaults are omitted)."""
        out = []
        rev = {v: k for k, v in self._ALIASES.items()}
        for f in fields(self):
            if f.name == "tolerances":
                continue
            v = getattr(self, f.name)
            if v is None or (f.name in self._BOOLS and not v):
                continue
            key = rev.get(f.name, f.name)
            if f.name in self._LISTS:
                v = self._LISTS[f.name][1](v)
            elif f.name in self._BOOLS:
                v = "true"
            out.append(f"{key} = {v}")
        for k in sorted(self.tolerances):
            out.append(f"tol.{k} = {self.tolerances[k]!r}")
        return "\n".join(out) + "\n"

    def merge(self, other: ExperimentConfig) -> ExperimentConfig:
        """Fields set in ``other`` override ``self``."""
        out = ExperimentConfig(**{f.name: getattr(self, f.name) for f in fields(self)})
        out.tolerances = dict(self.tolerances)
        for f in fields(other):
            v = getattr(other, f.name)
            if f.name == "tolerances":
                out.tolerances.update(v)
            elif f.name in self._BOOLS:
                setattr(out, f.name, getattr(out, f.name) or v)
            elif v is not None:
                setattr(out, f.name, v)
        return out

    def tol(self, name: str) -> float:
        return self.tolerances.get(name, TOL_DEFAULTS[name])

    def params(self) -> dict:
        """Report ``params`` block: the effective, non-output settings."""
        skip = {"output", "csv", "dump_matrix", "no_meta", "expect"}
        d = {}
        for f in fields(self):
            v = getattr(self, f.name)
            if f.name in skip or v is None or v is False or v == {}:
                continue
            d[f.name] = v
        return d


def _tol_value(name: str, value: str) -> float:
    if name not in TOL_DEFAULTS:
        raise CliError(f"unknown tolerance {name!r}; known: {', '.join(sorted(TOL_DEFAULTS))}")
    try:
        return float(value)
    except ValueError:
        raise CliError(f"tolerance {name}: not a number: {value!r}") from None


# -- argument parsing --------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    g = common.add_argument_group("inputs")
    g.add_argument("--weight", help="weight spec, e.g. bergman:1, powerlog, inv(powerlog), file:w.txt")
    g.add_argument("--weight-b", dest="weight_b", help="second weight (cowen)")
    g.add_argument("--invert", action="store_true", help="use 1/beta")
    g.add_argument("--lift", action="store_true", help="use (n+1) beta_n (after --invert)")
    g.add_argument("--symbol", help="poly:c0,c1,..  mobius:re,im[,theta]  blaschke:re,im;re,im[,theta]")
    g.add_argument("--f", help="series spec for expand / compose-check")
    g.add_argument("--h", help="outer series spec for compose-check")
    g.add_argument("--ladder", type=_ints, help="truncation ladder, e.g. 128,256,512")
    g.add_argument("--n", type=_ints, help="indices / sizes (command dependent)")
    g.add_argument("--t", type=_floats, help="Mobius parameters t")
    g.add_argument("--alpha", type=_floats, help="exponents alpha")
    g.add_argument("--lambda", dest="lam", help="point lambda as re,im")
    g.add_argument("--order", type=int, help="truncation order of series")
    g.add_argument("--grid", type=int, help="initial circle grid (index)")
    g.add_argument("--workers", type=int, help="threads for ladder rungs")
    g.add_argument("--seed", type=int, help="seed for randomized weights and bench data")
    g.add_argument("--tol", action="append", default=[], metavar="NAME=VALUE",
                   help=f"override a tolerance ({', '.join(sorted(TOL_DEFAULTS))})")
    o = common.add_argument_group("outputs")
    o.add_argument("--expect", help="expected verdict; a mismatch exits with status 2")
    o.add_argument("--output", help="write the JSON report here instead of stdout")
    o.add_argument("--csv", help="also write CSV rows")
    o.add_argument("--dump-matrix", dest="dump_matrix", help="write the main matrix (binary, or JSON for *.json)")
    o.add_argument("--config", help="flat key = value config file")
    o.add_argument("--no-meta", dest="no_meta", action="store_true", help="omit timestamps and versions")

    parser = _Parser(
        prog="hlab",
        description="Weighted Hardy space experiments.",
        epilog=__doc__.split("CSV columns", 1)[1].join(["CSV columns", ""]),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "weights": "weights, betas and growth class",
        "series": "Taylor coefficients of a symbol",
        "gram": "Gram matrix of the normalized power family",
        "riesz": "singular-value ladder and Riesz verdict",
        "growth": "r_n = ||phi^n|| / ||z^n|| trace",
        "dnlower": "||(phi_t')^alpha||_H2 against its lower bound",
        "blower": "A_alpha power norms against the derivative bound",
        "cowen": "norm ordering of C_psi on two weighted spaces",
        "index": "Fredholm index of M_(f - lambda)",
        "intertwine": "similarity intertwiner residual and bounds",
        "expand": "expansion of f in powers of a Mobius map",
        "compose-check": "check f = h o B",
        "bench": "naive vs FFT convolution and ladder SVD timings",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name], description=helps[name])
    return parser


def config_from_args(argv) -> ExperimentConfig:
    ns = build_parser().parse_args(argv)
    cli = ExperimentConfig()
    for f in fields(cli):
        if f.name != "tolerances" and hasattr(ns, f.name):
            setattr(cli, f.name, getattr(ns, f.name))
    for item in ns.tol:
        name, sep, value = item.partition("=")
        if not sep:
            raise CliError(f"--tol expects NAME=VALUE, got {item!r}")
        cli.tolerances[name.strip()] = _tol_value(name.strip(), value)
    cfg = ExperimentConfig()
    if ns.config:
        try:
            cfg = ExperimentConfig.from_text(Path(ns.config).read_text())
        except OSError as exc:
            raise CliError(f"cannot read config: {exc}") from None
        if cfg.command not in (None, ns.command):
            raise CliError(f"config is for {cfg.command!r}, command line says {ns.command!r}")
    merged = cfg.merge(cli)
    merged.command = ns.command
    return merged


# -- helpers -----------------------------------------------------------------


def _weight(cfg: ExperimentConfig, text: str | None = None, apply_flags: bool = True):
    text = text if text is not None else cfg.weight
    if text is None:
        raise CliError("--weight is required")
    if text.lower().startswith("flipbergman:") and text.count(":") == 1:
        text = f"{text}:{cfg.seed or 0}"
    seq = parse_weight(text)
    if apply_flags:
        if cfg.invert:
            seq = invert(seq)
        if cfg.lift:
            seq = lift(seq)
    return seq


def _symbol(cfg: ExperimentConfig, text: str | None = None, what: str = "--symbol"):
    text = text if text is not None else cfg.symbol
    if text is None:
        raise CliError(f"{what} is required")
    return parse_symbol(text, cfg.order or 256)


def _series(obj, order: int) -> PowerSeries:
    if isinstance(obj, PowerSeries):
        return obj.with_order(order)
    if isinstance(obj, MobiusMap):
        return mobius_series(obj, order)
    return blaschke_series(obj, order)


def _complex(text: str | None) -> complex:
    if text is None:
        return 0j
    parts = _floats(text.replace("−", "-"))
    if len(parts) == 1:
        return complex(parts[0])
    if len(parts) != 2:
        raise CliError(f"--lambda expects re,im, got {text!r}")
    return complex(parts[0], parts[1])


def _pass(ok: bool) -> str:
    return "Pass" if ok else "Fail"


def _matches(expect: str, verdict: str | None) -> bool:
    if verdict is None:
        return False
    try:
        return int(expect) == int(verdict)
    except ValueError:
        pass

    def norm(s):
        return "".join(ch for ch in s.lower() if ch.isalnum())

    return norm(verdict).startswith(norm(expect)) and norm(expect) != ""


# -- commands ----------------------------------------------------------------
# each returns (result, verdict, csv_rows or None, matrix or None)


def cmd_weights(cfg):
    seq = _weight(cfg)
    ks = cfg.n if cfg.n is not None else list(range(9))
    window = cfg.order or 100_000
    lb = seq.log_betas(max(ks) + 1)
    rows = [("k", "w_k", "beta_k")]
    table = []
    for k in ks:
        wk = float(seq.w(k)) if k >= 1 else math.nan
        bk = math.exp(lb[k])
        table.append({"k": k, "w": wk, "beta": bk})
        rows.append((k, wk, bk))
    gv = classify_growth(seq, window)
    res = {"weight": seq.spec, "flagged": seq.flagged, "values": table, "growth": gv.to_dict()}
    return res, gv.growth_class.value, rows, None


def cmd_series(cfg):
    order = cfg.order or 256
    sym = _symbol(cfg)
    f = _series(sym, order)
    count = (cfg.n or [min(order, 16)])[0]
    c = f.coeffs[:count]
    res = {"symbol": cfg.symbol, "order": order, "coeffs": c, "tail_estimate": tail_estimate(f)}
    if cfg.weight:
        seq = _weight(cfg)
        res["weight"] = seq.spec
        res["norm"] = weighted_norm(f, seq)
    rows = [("k", "re", "im")] + [(k, v.real, v.imag) for k, v in enumerate(c)]
    matrix = mult_matrix(f, min(order, 1024)) if cfg.dump_matrix else None
    return res, None, rows, matrix


def _family(cfg, count: int, order: int):
    sym = _symbol(cfg)
    if isinstance(sym, BlaschkeProduct):
        check_distinct(sym)
        return blaschke_family(sym, count, order)
    f = _series(sym, order)
    return powers(f, count), np.arange(count)


def cmd_gram(cfg):
    seq = _weight(cfg)
    count = (cfg.n or [16])[0]
    order = cfg.order or max(256, 8 * count)
    F, idx = _family(cfg, count, order)
    G = gram(F, seq, normalized=True, norm_index=idx)
    ev = np.linalg.eigvalsh(G)
    res = {
        "symbol": cfg.symbol,
        "weight": seq.spec,
        "count": count,
        "order": order,
        "hermitian_error": float(np.max(np.abs(G - G.conj().T))),
        "eig_min": float(ev[0]),
        "eig_max": float(ev[-1]),
    }
    if np.array_equal(idx, np.arange(count)):
        X = transformation_matrix(F, count, order)
        res["factored_deviation"] = float(np.max(np.abs(G - gram_factored(X, seq))))
    rows = [("i", "j", "re", "im")] + [
        (i, j, G[i, j].real, G[i, j].imag) for i in range(count) for j in range(count)
    ]
    ok = ev[0] >= -cfg.tol("psd") * max(ev[-1], 0.0)
    return res, "PSD" if ok else "NotPSD", rows, G


def cmd_riesz(cfg):
    seq = _weight(cfg)
    ladder = cfg.ladder or [128, 256, 512]
    sym = _symbol(cfg)
    kw = dict(plateau=cfg.tol("plateau"), collapse=cfg.tol("collapse"), workers=cfg.workers)
    if isinstance(sym, BlaschkeProduct):
        rep = riesz_blaschke_family(sym, seq, ladder, cfg.tol("riesz"), **kw)
    else:
        top = max(ladder)
        order = max(cfg.order or 0, 2 * top)
        F = mobius_family(sym, top, order) if isinstance(sym, MobiusMap) else powers(_series(sym, order), top)
        rep = riesz_verdict(F, seq, ladder, cfg.tol("riesz"), family=cfg.symbol, **kw)
    return rep.to_dict(), rep.verdict.value, list(rep.csv_rows()), None


def cmd_growth(cfg):
    seq = _weight(cfg)
    sym = _symbol(cfg)
    if not isinstance(sym, MobiusMap):
        raise CliError("growth needs a mobius symbol")
    ns = cfg.n or [0, 16, 64, 256]
    order = cfg.order or 1 << max(10, (4 * max(ns) - 1).bit_length())
    tr = growth_trace(sym, seq, ns, order)
    r = tr.r
    if max(r) / min(r) < cfg.tol("bounded_ratio"):
        verdict = "Bounded"
    elif all(b > a for a, b in zip(r, r[1:])) and r[-1] / r[0] > cfg.tol("growth_ratio"):
        verdict = "Growing"
    else:
        verdict = "Inconclusive"
    res = tr.to_dict()
    res["order"] = order
    return res, verdict, list(tr.csv_rows()), None


def cmd_dnlower(cfg):
    order = cfg.order or 8192
    recs = [dnlower_check(t, a, order) for t in (cfg.t or [0.3, 0.6, 0.9]) for a in (cfg.alpha or [0.75, 1, 2, 4])]
    rows = [("t", "alpha", "norm", "bound", "pass")] + [
        (r["t"], r["alpha"], r["norm"], r["bound"], r["pass"]) for r in recs
    ]
    return {"checks": recs}, _pass(all(r["pass"] for r in recs)), rows, None


def cmd_blower(cfg):
    ns = cfg.n or [256]
    order = cfg.order or 1 << max(11, (8 * max(ns) - 1).bit_length())
    recs = [
        blower_check(t, a, n, order)
        for t in (cfg.t or [0.5])
        for a in (cfg.alpha or [1.0])
        for n in ns
    ]
    rows = [("t", "alpha", "n", "lhs", "rhs", "pass")] + [
        (r["t"], r["alpha"], r["n"], r["lhs"], r["rhs"], r["pass"]) for r in recs
    ]
    return {"checks": recs}, _pass(all(r["pass"] for r in recs)), rows, None


def cmd_cowen(cfg):
    order = cfg.order or 512
    psi = _series(_symbol(cfg), order)
    a = _weight(cfg)
    if cfg.weight_b is None:
        raise CliError("--weight-b is required")
    b = _weight(cfg, cfg.weight_b, apply_flags=False)
    rec = cowen_transfer_check(psi, a, b, order)
    return rec, _pass(rec["pass"]), None, None


def cmd_index(cfg):
    order = cfg.order or 256
    f = _series(_symbol(cfg), order)
    lam = _complex(cfg.lam)
    idx = fredholm_index(f, lam, cfg.grid)
    return {"symbol": cfg.symbol, "lambda": lam, "order": order, "index": idx}, str(idx), None, None


def cmd_intertwine(cfg):
    seq = _weight(cfg)
    sym = _symbol(cfg)
    rows = [("N", "residual", "full_residual", "sigma_max", "sigma_min")]
    reps = []
    for N in cfg.n or [256]:
        if isinstance(sym, MobiusMap):
            rep, tol = composition_intertwiner(sym, seq, N), cfg.tol("residual_mobius")
        elif isinstance(sym, BlaschkeProduct):
            rep, tol = blaschke_intertwiner(sym, seq, N), cfg.tol("residual_blaschke")
        else:
            raise CliError("intertwine needs a mobius or blaschke symbol")
        reps.append(rep)
        b = rep.invertibility
        rows.append((N, rep.residual, rep.full_residual, b.sigma_max, b.sigma_min))
    ok = all(r.residual <= tol for r in reps)
    res = {"runs": [r.to_dict() for r in reps], "residual_tolerance": tol}
    return res, _pass(ok), rows, reps[-1].matrix


def cmd_expand(cfg):
    order = cfg.order or 1024
    sym = _symbol(cfg)
    if not isinstance(sym, MobiusMap):
        raise CliError("expand needs a mobius --symbol")
    f = _series(_symbol(cfg, cfg.f, "--f"), order)
    lam, res_norm = expansion_residual(f, sym)
    count = (cfg.n or [16])[0]
    rows = [("k", "re", "im")] + [(k, v.real, v.imag) for k, v in enumerate(lam[:count])]
    res = {"f": cfg.f, "symbol": cfg.symbol, "order": order, "lambda": lam[:count], "residual": res_norm}
    return res, _pass(res_norm <= cfg.tol("expand")), rows, None


def cmd_compose_check(cfg):
    order = cfg.order or 256
    b = _symbol(cfg)
    if not isinstance(b, BlaschkeProduct):
        raise CliError("compose-check needs a blaschke --symbol")
    f = _series(_symbol(cfg, cfg.f, "--f"), order)
    h = _series(_symbol(cfg, cfg.h, "--h"), order)
    rec = check_h_circ_B(f, h, b, order)
    return rec, _pass(rec["residual"] <= cfg.tol("compose")), None, None


def _time(fn, budget: float = 0.2) -> tuple[float, int]:
    t0 = time.perf_counter()
    fn()
    once = time.perf_counter() - t0
    reps = max(1, min(1000, int(budget / max(once, 1e-9))))
    t0 = time.perf_counter()
    for _ in range(reps):
        fn()
    return (time.perf_counter() - t0) / reps * 1e9, reps


def bench(n_list, ladder=(64, 128), seed: int = 0, agreement: float = 1e-10) -> dict:
    """Time naive vs FFT truncated convolution and a Riesz ladder."""
    rng = np.random.default_rng(seed)
    conv = []
    for N in n_list:
        a = rng.standard_normal(N) + 1j * rng.standard_normal(N)
        b = rng.standard_normal(N) + 1j * rng.standard_normal(N)
        naive, fast = _direct(a, b), _fft(a, b)
        scale = max(1.0, float(np.max(np.abs(naive))))
        err = float(np.max(np.abs(naive - fast)) / scale)
        t_naive, r_naive = _time(lambda: _direct(a, b))
        t_fft, r_fft = _time(lambda: _fft(a, b))
        conv.append({
            "N": N, "rel_error": err, "agree": err <= agreement,
            "naive_ns": t_naive, "naive_reps": r_naive, "fft_ns": t_fft, "fft_reps": r_fft,
            "speedup": t_naive / t_fft,
        })
    ladder = list(ladder)
    fam = mobius_family(MobiusMap(0.5), max(ladder), 2 * max(ladder))
    t_svd, r_svd = _time(lambda: riesz_verdict(fam, bergman(1), ladder), budget=0.5)
    return {"convolution": conv, "ladder": {"ladder": ladder, "ns": t_svd, "reps": r_svd}}


def cmd_bench(cfg):
    res = bench(cfg.n or [1, 1024, 16384], cfg.ladder or [64, 128], cfg.seed or 0, cfg.tol("agreement"))
    rows = [("kernel", "N", "ns_per_op", "reps")]
    for c in res["convolution"]:
        rows.append(("naive", c["N"], c["naive_ns"], c["naive_reps"]))
        rows.append(("fft", c["N"], c["fft_ns"], c["fft_reps"]))
    lad = res["ladder"]
    rows.append(("ladder_svd", max(lad["ladder"]), lad["ns"], lad["reps"]))
    return res, _pass(all(c["agree"] for c in res["convolution"])), rows, None


HANDLERS = {
    "weights": cmd_weights, "series": cmd_series, "gram": cmd_gram, "riesz": cmd_riesz,
    "growth": cmd_growth, "dnlower": cmd_dnlower, "blower": cmd_blower, "cowen": cmd_cowen,
    "index": cmd_index, "intertwine": cmd_intertwine, "expand": cmd_expand,
    "compose-check": cmd_compose_check, "bench": cmd_bench,
}


def execute(cfg: ExperimentConfig) -> tuple[dict, int]:
    """Run a resolved config; returns ``(report, exit_code)`` without writing anything."""
    result, verdict, _, _ = HANDLERS[cfg.command](cfg)
    rep = rp.make_report(cfg.command, cfg.params(), result, verdict, meta=not cfg.no_meta)
    return rep, _status(cfg, verdict)


def _status(cfg, verdict) -> int:
    if cfg.expect is not None:
        return 0 if _matches(cfg.expect, verdict) else 2
    return 2 if verdict in ("Fail", "NotPSD") else 0


def run(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        cfg = config_from_args(argv)
        result, verdict, rows, matrix = HANDLERS[cfg.command](cfg)
        rep = rp.make_report(cfg.command, cfg.params(), result, verdict, meta=not cfg.no_meta)
        text = rp.dumps(rep)
        if cfg.output:
            Path(cfg.output).write_text(text)
        else:
            sys.stdout.write(text)
        if cfg.csv and rows:
            rp.write_csv(cfg.csv, rows)
        if cfg.dump_matrix:
            if matrix is None:
                raise CliError(f"{cfg.command} has no matrix to dump")
            rp.dump_matrix(cfg.dump_matrix, matrix)
    except (CliError, ValueError, ZeroDivisionError, IndexError, OSError, jsonschema.ValidationError) as exc:
        msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        print(f"hlab: error: {msg}", file=sys.stderr)
        return 1
    return _status(cfg, verdict)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
