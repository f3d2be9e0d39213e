"""Instance generation, verification suites and machine-readable reports."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .akcoglu import (
    GridFunction,
    build_coupling,
    coupling_residuals,
    make_integral_preserving,
    verify_dilation,
    verify_EQE,
    verify_main_result,
    verify_tau_transport,
)
from .interval_space import PcFunction, make_partition, partition_from_breakpoints
from .markov_ops import L1Operator, check_power_dilation, classify
from .montecarlo import SampleConfig, compare_mc_exact
from .rota import PathSpace, check_hypotheses, power_limit, random_reversible_chain, rota_check

__all__ = [
    "InstanceFile",
    "CheckRecord",
    "Report",
    "gen_instance",
    "run_verify",
    "run_mc",
    "emit_report",
    "report_text",
    "load_instance",
]

KINDS = ("akcoglu", "rota")
UNBOUNDED = sys.float_info.max


@dataclass
class InstanceFile:
    mu: list[float]
    T: list[list[float]]
    f: list[float] | None = None
    kind: str = "akcoglu"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown instance kind {self.kind!r}")
        if not self.mu:
            raise ValueError("mu must be non-empty")
        m = len(self.mu)
        self.mu = [float(x) for x in self.mu]
        if any(not math.isfinite(x) or x <= 0 for x in self.mu):
            raise ValueError("mu entries must be positive finite numbers")
        if len(self.T) != m or any(len(row) != m for row in self.T):
            raise ValueError(f"T must be a {m}x{m} matrix")
        self.T = [[float(x) for x in row] for row in self.T]
        if any(not math.isfinite(x) for row in self.T for x in row):
            raise ValueError("T entries must be finite")
        if self.f is not None:
            if len(self.f) != m:
                raise ValueError(f"f must have {m} entries")
            self.f = [float(x) for x in self.f]

    @classmethod
    def from_dict(cls, d: dict) -> "InstanceFile":
        unknown = set(d) - {"mu", "T", "f", "kind"}
        if unknown:
            raise ValueError(f"unknown instance fields: {sorted(unknown)}")
        try:
            return cls(mu=d["mu"], T=d["T"], f=d.get("f"), kind=d.get("kind", "akcoglu"))
        except (KeyError, TypeError) as e:
            raise ValueError(f"malformed instance: {e}") from None

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "mu": self.mu, "T": self.T}
        if self.f is not None:
            out["f"] = self.f
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @property
    def digest(self) -> str:
        canon = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode("utf-8")).hexdigest()

    def operator(self) -> L1Operator:
        return L1Operator(make_partition(self.mu, total=sum(self.mu)), self.T)


def load_instance(path) -> InstanceFile:
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ValueError(f"{path}: not valid JSON ({e})") from None
    if not isinstance(data, dict):
        raise ValueError(f"{path}: expected a JSON object")
    return InstanceFile.from_dict(data)


@dataclass
class CheckRecord:
    name: str
    params: dict
    residual: float
    tolerance: float
    passed: bool
    wall_time: float = 0.0
    message: str = ""

    def __post_init__(self):
        if not math.isfinite(self.residual):
            self.residual = UNBOUNDED
            self.passed = False


@dataclass
class Report:
    checks: list[CheckRecord] = field(default_factory=list)
    version: str = __version__
    input_digest: str = ""

    @property
    def verdict(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "version": self.version,
            "input_digest": self.input_digest,
            "verdict": self.verdict,
            "checks": [asdict(c) for c in self.checks],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Report":
        return cls([CheckRecord(**c) for c in d["checks"]], d["version"], d["input_digest"])


class _Suite:
    def __init__(self, report: Report):
        self.report = report

    def run(self, name: str, tolerance: float, fn, **params) -> bool:
        """Run ``fn`` and record its residual; rejections become failed checks."""
        t0 = time.perf_counter()
        message = ""
        try:
            out = fn()
            residual, extra = out if isinstance(out, tuple) else (out, {})
            params = {**params, **extra}
            passed = residual <= tolerance
        except (ValueError, ArithmeticError) as e:
            residual, passed, message = UNBOUNDED, False, f"rejected: {e}"
        rec = CheckRecord(name, params, float(residual), tolerance, passed, time.perf_counter() - t0, message)
        self.report.checks.append(rec)
        return rec.passed


def _nonneg_residual(x: float) -> float:
    return float(max(0.0, x))


def gen_instance(kind: str, m: int, seed: int, integral_preserving: bool = True) -> InstanceFile:
    """Random instance, deterministic in ``(kind, m, seed, integral_preserving)``."""
    if m < 1:
        raise ValueError("size must be at least 1")
    rng = np.random.default_rng(seed)
    if kind == "rota":
        P = random_reversible_chain(m, rng)
        f = rng.normal(size=m)
        return InstanceFile(P.weights.tolist(), P.matrix.tolist(), f.tolist(), "rota")
    if kind != "akcoglu":
        raise ValueError(f"unknown instance kind {kind!r}")
    mu = rng.random(m) + 0.1
    mu = mu / mu.sum()
    A = rng.random((m, m)) * (rng.random((m, m)) > 0.2)
    A[np.diag_indices(m)] += 0.05
    T = A / (mu @ A)[None, :] * mu[None, :]
    if not integral_preserving:
        T = T * rng.uniform(0.3, 1.0, size=m)[None, :]
    f = rng.normal(size=m)
    return InstanceFile(mu.tolist(), T.tolist(), f.tolist(), "akcoglu")


def _random_grid_function(c, rng) -> GridFunction:
    x_pts = np.concatenate([c.base.breakpoints, rng.random(3) * c.base.total])
    y_pts = np.concatenate([[0.0, 1.0], rng.random(4)])
    gx, gy = partition_from_breakpoints(x_pts), partition_from_breakpoints(y_pts)
    return GridFunction(gx, gy, rng.normal(size=(len(gx), len(gy))))


def _akcoglu_suite(inst: InstanceFile, N: int, mc_samples: int, seed: int, suite: _Suite) -> None:
    rng = np.random.default_rng(seed)
    T = inst.operator()
    f = PcFunction(T.base, inst.f if inst.f is not None else rng.normal(size=T.size))
    flags = classify(T)

    def gate():
        neg = _nonneg_residual(-T.matrix.min())
        excess = _nonneg_residual(flags.norm - 1.0)
        return max(neg, excess), {
            "positive": flags.positive,
            "contraction": flags.contraction,
            "integral_preserving": flags.integral_preserving,
        }

    if not suite.run("classify", 1e-12, gate):
        suite.report.checks[-1].message = "not a positive contraction; later checks skipped"
        return

    state = {}

    def extend():
        if flags.integral_preserving:
            state["Tp"], state["embed"] = T, np.eye(T.size)
            return 0.0, {"extended": False}
        Tp, embed, project = make_integral_preserving(T)
        state["Tp"], state["embed"] = Tp, embed
        return float(check_power_dilation(T, Tp, embed, project, N).max()), {"extended": True}

    if not suite.run("make_integral_preserving", 1e-12, extend, horizon=N):
        return

    def coupling():
        state["c"] = build_coupling(state["Tp"])
        res = coupling_residuals(state["c"])
        return max(res.values()), {}

    if not suite.run("build_coupling", 1e-10, coupling):
        return
    c = state["c"]
    fp = PcFunction(c.base, state["embed"] @ f.values)
    suite.run("verify_main_result", 1e-10, lambda: verify_main_result(c, fp))
    suite.run("verify_tau_transport", 1e-10, lambda: verify_tau_transport(c, 2, seed=seed), radius=2)
    g = _random_grid_function(c, rng)
    suite.run("verify_EQE", 1e-10, lambda: verify_EQE(c, g))
    for n in range(N + 1):
        suite.run("verify_dilation", 1e-9, lambda n=n: float(verify_dilation(T, f, n)[n]), n=n)
    if mc_samples > 0:
        _mc_check(c, fp, SampleConfig(seed, mc_samples, N), suite)


def _mc_check(c, f, cfg: SampleConfig, suite: _Suite) -> None:
    def mc():
        cmp = compare_mc_exact(c, f, cfg)
        return cmp.max_z, {
            "estimate": cmp.estimate.tolist(),
            "stderr": cmp.stderr.tolist(),
            "exact": cmp.exact.tolist(),
        }

    suite.run("compare_mc_exact", 4.0, mc, samples=cfg.samples, horizon=cfg.horizon, seed=cfg.seed)


def _rota_suite(inst: InstanceFile, N: int, seed: int, suite: _Suite) -> None:
    rng = np.random.default_rng(seed)
    P = inst.operator()
    f = PcFunction(P.base, inst.f if inst.f is not None else rng.normal(size=P.size))
    hyp = check_hypotheses(P)

    def hypotheses():
        return max(hyp.positivity_residual, hyp.stochastic_residual, hyp.balance_residual), {
            "positive": hyp.positive,
            "stochastic": hyp.stochastic,
            "detailed_balance": hyp.detailed_balance,
        }

    if not suite.run("check_hypotheses", 1e-12, hypotheses):
        suite.report.checks[-1].message = "hypotheses fail; later checks skipped"
        return
    for n in range(N + 1):
        suite.run("rota_check", 1e-10, lambda n=n: rota_check(PathSpace(P, 2 * n + 1), f, n), n=n, length=2 * n + 1)

    def limit():
        pl = power_limit(P, f)
        if not pl.converged:
            raise ValueError(f"iterates did not settle within {pl.iterations} steps")
        return pl.discrepancy, {"limit": pl.limit.values.tolist(), "iterations": pl.iterations}

    suite.run("power_limit", 1e-8, limit)


def run_verify(instance: InstanceFile, N: int = 4, mc_samples: int = 0, seed: int = 0) -> Report:
    """Run every check applicable to ``instance`` and collect a report."""
    report = Report(input_digest=instance.digest)
    suite = _Suite(report)
    if instance.kind == "rota":
        _rota_suite(instance, N, seed, suite)
    else:
        _akcoglu_suite(instance, N, mc_samples, seed, suite)
    return report


def run_mc(instance: InstanceFile, N: int, mc_samples: int, seed: int) -> Report:
    """Monte Carlo comparison only."""
    report = Report(input_digest=instance.digest)
    suite = _Suite(report)
    T = instance.operator()
    f = PcFunction(T.base, instance.f if instance.f is not None else np.random.default_rng(seed).normal(size=T.size))
    state = {}

    def coupling():
        Tp = T
        flags = classify(T)
        if not flags.integral_preserving:
            Tp, embed, _ = make_integral_preserving(T)
            state["f"] = PcFunction(Tp.base, embed @ f.values)
        else:
            state["f"] = f
        state["c"] = build_coupling(Tp)
        return max(coupling_residuals(state["c"]).values())

    if suite.run("build_coupling", 1e-10, coupling):
        _mc_check(state["c"], state["f"], SampleConfig(seed, mc_samples, N), suite)
    return report


CSV_FIELDS = ("name", "params", "residual", "tolerance", "passed", "wall_time", "message")


def report_text(report: Report, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report.to_dict(), indent=2) + "\n"
    if fmt != "csv":
        raise ValueError(f"unknown report format {fmt!r}")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for c in report.checks:
        w.writerow([
            c.name,
            json.dumps(c.params, sort_keys=True),
            repr(c.residual),
            repr(c.tolerance),
            str(c.passed).lower(),
            repr(c.wall_time),
            c.message,
        ])
    return buf.getvalue()


def emit_report(report: Report, fmt: str, path) -> Path:
    path = Path(path)
    text = report_text(report, fmt)
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as e:
        raise OSError(f"cannot write report to {path}: {e.strerror or e}") from e
    return path
