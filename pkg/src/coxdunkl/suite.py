"""Verification suite: configuration, per-group checks, reports.

Exit codes: 0 all pass, 1 at least one failure, 2 usage/config error,
3 a size budget was exhausted.
"""

from __future__ import annotations

import json
import os
import threading
import time
from dataclasses import dataclass, field
from functools import lru_cache

from .coxeter import (DEFAULT_ENUMERATION_BUDGET, HEAVY_LABELS,
                      build_root_system, chevalley_q_identity, compute_degrees,
                      enumerate_group, known_label, poincare_polynomial,
                      psi_invariant, rank2_parabolics, standard_diagram,
                      verify_psi_identities)
from .dunkl import b_poly, closed_form_b_string, gamma_form
from .errors import BudgetError, ConfigError
from .mmintegral import (DEFAULT_WICK_BUDGET, check_functional_equation,
                         gamma_integral_cross_check, gamma_product_exact,
                         mm_exact, mm_log_moments, predicted_relative_se)
from .polynomials import MultiPoly
from .scalars import KPoly, rat

SUITE_VERSION = 1

DEFAULT_GROUPS = ("A1", "A2", "A3", "B2", "B3", "D4", "I2(5)", "I2(7)", "H3")

CHECK_ORDER = (
    "poincare_identity",
    "degrees_consistency",
    "chevalley",
    "psi_identities",
    "b_poly",
    "mm_exact_k1",
    "mm_exact_k2",
    "functional_equation",
    "gamma_cross_check",
    "log_moments",
)


@dataclass
class SuiteConfig:
    groups: tuple = DEFAULT_GROUPS
    checks: tuple = CHECK_ORDER
    mc_samples: int = 10_000_000
    seed: int = 42
    shards: int = 16
    enumeration_budget: int = DEFAULT_ENUMERATION_BUDGET
    heavy_types_enabled: bool = False
    output_path: str = None

    def render(self) -> str:
        lines = [
            f"groups = {', '.join(self.groups)}",
            f"checks = {', '.join(self.checks)}",
            f"mc_samples = {self.mc_samples}",
            f"seed = {self.seed}",
            f"shards = {self.shards}",
            f"enumeration_budget = {self.enumeration_budget}",
            f"heavy_types_enabled = {'true' if self.heavy_types_enabled else 'false'}",
        ]
        if self.output_path:
            lines.append(f"output_path = {self.output_path}")
        return "\n".join(lines) + "\n"


_INT_KEYS = {"mc_samples", "seed", "shards", "enumeration_budget"}


def parse_config(text: str) -> SuiteConfig:
    """Line-oriented `key = value` format; '#' starts a comment; lists are
    comma separated.  Unknown keys, groups or checks are rejected up front."""
    cfg = SuiteConfig()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected `key = value`, got {raw!r}", lineno)
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key == "groups":
            groups = tuple(g.strip() for g in value.split(",") if g.strip())
            for g in groups:
                if not known_label(g):
                    raise ConfigError(f"unknown group {g!r}", lineno)
            cfg.groups = groups
        elif key == "checks":
            checks = tuple(c.strip() for c in value.split(",") if c.strip())
            for c in checks:
                if c not in CHECK_ORDER:
                    raise ConfigError(f"unknown check {c!r}", lineno)
            cfg.checks = checks
        elif key in _INT_KEYS:
            try:
                iv = int(value)
            except ValueError:
                raise ConfigError(f"{key} needs an integer, got {value!r}", lineno)
            if iv <= 0:
                raise ConfigError(f"{key} must be positive", lineno)
            setattr(cfg, key, iv)
        elif key == "heavy_types_enabled":
            low = value.lower()
            if low not in ("true", "false"):
                raise ConfigError(f"{key} needs true/false, got {value!r}", lineno)
            cfg.heavy_types_enabled = (low == "true")
        elif key == "output_path":
            cfg.output_path = value
        else:
            raise ConfigError(f"unknown key {key!r}", lineno)
    return cfg


@dataclass
class CheckReport:
    name: str
    group: str
    mode: str       # "exact" | "statistical"
    status: str     # "pass" | "fail" | "skipped"
    expected: str
    actual: str
    z_score: float = None
    runtime_ms: int = 0

    def as_dict(self):
        out = {
            "name": self.name,
            "group": self.group,
            "mode": self.mode,
            "status": self.status,
            "expected": self.expected,
            "actual": self.actual,
        }
        if self.z_score is not None:
            out["z_score"] = self.z_score
        out["runtime_ms"] = self.runtime_ms
        return out


# ---------------------------------------------------------------------------
# per-group context
# ---------------------------------------------------------------------------


@dataclass
class GroupContext:
    label: str
    rs: object
    elements: list
    poincare: object
    degrees: object
    cache: dict = field(default_factory=dict)
    lock: object = field(default_factory=threading.Lock)


@lru_cache(maxsize=None)
def group_context(label: str,
                  enumeration_budget=DEFAULT_ENUMERATION_BUDGET) -> GroupContext:
    diagram = standard_diagram(label)
    rs = build_root_system(diagram)
    elements = enumerate_group(rs, budget=enumeration_budget)
    poincare = poincare_polynomial(elements, rs.spec)
    degrees = compute_degrees(rs, poincare)
    return GroupContext(label, rs, elements, poincare, degrees)


def _heavy(label):
    return label in HEAVY_LABELS


# ---------------------------------------------------------------------------
# individual checks
# ---------------------------------------------------------------------------


def _check_poincare(ctx, cfg):
    spec = ctx.rs.spec
    one_minus_q = KPoly.from_coeffs(spec, [1, -1])
    lhs = ctx.poincare * one_minus_q ** ctx.rs.rank
    rhs = KPoly.one(spec)
    for d in ctx.degrees.degrees:
        rhs = rhs * KPoly.from_coeffs(spec, [1] + [0] * (d - 1) + [-1])
    ok = lhs == rhs
    return ("exact", ok, rhs.to_string("q"), lhs.to_string("q"), None)


def _check_degrees(ctx, cfg):
    dd = ctx.degrees
    prod = 1
    for d in dd.degrees:
        prod *= d
    ssum = sum(d - 1 for d in dd.degrees)
    expected = f"prod(d_i)={len(ctx.elements)}, sum(d_i-1)={ctx.rs.num_positive}"
    actual = f"prod(d_i)={prod}, sum(d_i-1)={ssum}, degrees={list(dd.degrees)}"
    ok = prod == len(ctx.elements) and ssum == ctx.rs.num_positive
    return ("exact", ok, expected, actual, None)


def _check_chevalley(ctx, cfg):
    res = chevalley_q_identity(ctx.rs, ctx.elements, ctx.degrees)
    fmt = lambda fr: f"({fr[0].to_string('q')}) / ({fr[1].to_string('q')})"
    return ("exact", res.equal, fmt(res.rhs), fmt(res.lhs), None)


def _check_psi(ctx, cfg):
    rep = verify_psi_identities(ctx.rs, ctx.degrees)
    expected = f"psi={rep.psi}"
    actual = (f"parabolic_sum={rep.parabolic_sum}, "
              f"trace_identity={'ok' if rep.trace_identity_ok else 'FAIL'}, "
              f"census={dict(rep.census)}")
    return ("exact", rep.parabolic_ok and rep.trace_identity_ok,
            expected, actual, None)


def _b_gated(ctx, cfg):
    rs = ctx.rs
    return (rs.num_positive > 15 or rs.rank > 4) and not cfg.heavy_types_enabled


def _b_result(ctx, cfg):
    # serialized per group: parallel checks share one computation
    with ctx.lock:
        res = ctx.cache.get("b_poly")
        if res is None:
            res = b_poly(ctx.rs, ctx.degrees,
                         allow_heavy=cfg.heavy_types_enabled)
            ctx.cache["b_poly"] = res
    return res


def _check_b_poly(ctx, cfg):
    if _b_gated(ctx, cfg):
        return ("exact", None,
                f"|S|={ctx.rs.num_positive} exceeds the default budget",
                "skipped (enable heavy_types_enabled)", None)
    res = _b_result(ctx, cfg)
    ok = res.equal and res.roots_exact
    expected = closed_form_b_string(ctx.degrees)
    if ok:
        actual = expected + " (roots -m/d_i verified)"
    else:
        actual = res.computed.to_string()
    return ("exact", ok, expected, actual, None)


def _check_mm_exact(ctx, cfg, k):
    rs = ctx.rs
    if 2 * k * rs.num_positive > DEFAULT_WICK_BUDGET:
        return ("exact", None,
                f"2k|S|={2 * k * rs.num_positive} exceeds moment budget "
                f"{DEFAULT_WICK_BUDGET}", "skipped", None)
    value = mm_exact(rs, k)
    target = gamma_product_exact(ctx.degrees, k)
    ok = value == rs.spec.from_rational(target)
    return ("exact", ok, str(target), str(value), None)


#: a statistical check is only attempted when the moment estimator's predicted
#: relative standard error (known in closed form) resolves a 4-sigma band
MC_REL_SE_GATE = 0.02


def _check_functional_equation(ctx, cfg, threads):
    if _b_gated(ctx, cfg):
        return ("statistical", None, "needs b(k)",
                "skipped (b_poly gated for this type)", None)
    k = rat(1, 2)
    pse = max(predicted_relative_se(ctx.degrees, float(k), cfg.mc_samples),
              predicted_relative_se(ctx.degrees, float(k) + 1.0,
                                    cfg.mc_samples))
    if pse > MC_REL_SE_GATE:
        return ("statistical", None,
                f"predicted rel. std error {pse:.3g} <= {MC_REL_SE_GATE}",
                "skipped (heavy-tailed estimator; raise mc_samples)", None)
    b = _b_result(ctx, cfg).computed
    rep = check_functional_equation(ctx.rs, b, k, cfg.mc_samples,
                                    cfg.seed, cfg.shards, threads)
    mode = "exact" if rep.exact else "statistical"
    expected = f"F(k+1) = b(k) F(k) at k=1/2; rhs={rep.rhs:.6g}"
    actual = f"lhs={rep.lhs:.6g}"
    return (mode, rep.passed, expected, actual,
            None if rep.exact else rep.z_score)


def _check_gamma_cross(ctx, cfg, threads):
    rs = ctx.rs
    f = MultiPoly.variable(rs, 0, 2)
    g = MultiPoly.one(rs)
    for k in (rat(1, 2), rat(1, 4), rat(1, 8)):
        if predicted_relative_se(ctx.degrees, float(k),
                                 cfg.mc_samples) <= MC_REL_SE_GATE:
            break
    else:
        return ("statistical", None,
                f"predicted rel. std error <= {MC_REL_SE_GATE}",
                "skipped (heavy-tailed estimator; raise mc_samples)", None)
    rep = gamma_integral_cross_check(rs, f, g, k, cfg.mc_samples,
                                     cfg.seed, cfg.shards, threads)
    expected = f"gamma(u1^2, 1) at k={k} = {rep.exact_value:.8g}"
    actual = f"mc_ratio={rep.estimate:.8g} (se={rep.std_error:.2g})"
    return ("statistical", rep.passed, expected, actual, rep.z_score)


def _check_log_moments(ctx, cfg, threads):
    rep = mm_log_moments(ctx.rs, cfg.mc_samples, cfg.seed, cfg.shards, threads,
                         dd=ctx.degrees)
    expected = f"E[log Delta^2] = -EulerGamma*|S| = {rep.target:.8g}"
    actual = f"mean={rep.mean:.8g} (se={rep.std_error:.2g})"
    return ("statistical", rep.passed, expected, actual, rep.z_score)


def run_check(name, ctx, cfg, threads=1):
    """Run one named check; returns a CheckReport."""
    start = time.perf_counter()
    if name == "poincare_identity":
        res = _check_poincare(ctx, cfg)
    elif name == "degrees_consistency":
        res = _check_degrees(ctx, cfg)
    elif name == "chevalley":
        res = _check_chevalley(ctx, cfg)
    elif name == "psi_identities":
        res = _check_psi(ctx, cfg)
    elif name == "b_poly":
        res = _check_b_poly(ctx, cfg)
    elif name == "mm_exact_k1":
        res = _check_mm_exact(ctx, cfg, 1)
    elif name == "mm_exact_k2":
        res = _check_mm_exact(ctx, cfg, 2)
    elif name == "functional_equation":
        res = _check_functional_equation(ctx, cfg, threads)
    elif name == "gamma_cross_check":
        res = _check_gamma_cross(ctx, cfg, threads)
    elif name == "log_moments":
        res = _check_log_moments(ctx, cfg, threads)
    else:
        raise ValueError(f"unknown check {name!r}")
    mode, ok, expected, actual, z = res
    runtime_ms = int((time.perf_counter() - start) * 1000)
    status = "skipped" if ok is None else ("pass" if ok else "fail")
    return CheckReport(name, ctx.label, mode, status, expected, actual, z,
                       runtime_ms)


def default_threads():
    env = os.environ.get("COXDUNKL_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def run_suite(cfg: SuiteConfig, threads=None):
    """Run the configured checks on the configured groups.

    Returns (reports, exit_code).  Reports come back in deterministic
    (group, check) order regardless of execution interleaving."""
    if threads is None:
        threads = default_threads()
    reports = []
    budget_hit = False
    contexts = {}
    for label in cfg.groups:
        if _heavy(label) and not cfg.heavy_types_enabled:
            continue
        try:
            contexts[label] = group_context(label, cfg.enumeration_budget)
        except BudgetError as exc:
            contexts[label] = exc
            budget_hit = True

    tasks = []
    for label in cfg.groups:
        for check in CHECK_ORDER:
            if check in cfg.checks:
                tasks.append((label, check))

    budget_flags = []

    def run_task(label, check):
        if _heavy(label) and not cfg.heavy_types_enabled:
            return CheckReport(check, label, "exact", "skipped",
                               "heavy type", "enable heavy_types_enabled", None, 0)
        ctx = contexts[label]
        if isinstance(ctx, BudgetError):
            return CheckReport(check, label, "exact", "skipped",
                               "within enumeration budget", str(ctx), None, 0)
        try:
            return run_check(check, ctx, cfg, threads=1)
        except BudgetError as exc:
            budget_flags.append(label)
            return CheckReport(check, label, "exact", "skipped",
                               "within size budget", str(exc), None, 0)

    if threads > 1 and len(tasks) > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [pool.submit(run_task, label, check)
                       for label, check in tasks]
            reports = [f.result() for f in futures]
    else:
        reports = [run_task(label, check) for label, check in tasks]

    failures = sum(1 for r in reports if r.status == "fail")
    if failures:
        code = 1
    elif budget_hit or budget_flags:
        code = 3
    else:
        code = 0
    return reports, code


def render_report(reports, fmt="json", seed=42) -> str:
    """Machine-readable JSON or an aligned table; field order is fixed."""
    if fmt == "json":
        doc = {
            "suite_version": SUITE_VERSION,
            "seed": seed,
            "checks": [r.as_dict() for r in reports],
            "failures": sum(1 for r in reports if r.status == "fail"),
        }
        return json.dumps(doc, separators=(",", ":"))
    if fmt == "table":
        headers = ("group", "check", "mode", "status", "z", "ms")
        rows = []
        for r in reports:
            z = "" if r.z_score is None else f"{r.z_score:+.2f}"
            rows.append((r.group, r.name, r.mode, r.status, z,
                         str(r.runtime_ms)))
        widths = [max(len(h), *(len(row[i]) for row in rows)) if rows else len(h)
                  for i, h in enumerate(headers)]
        lines = ["  ".join(h.ljust(widths[i]) for i, h in enumerate(headers))]
        lines.append("  ".join("-" * w for w in widths))
        for row in rows:
            lines.append("  ".join(row[i].ljust(widths[i])
                                   for i in range(len(headers))))
        return "\n".join(lines)
    raise ValueError(f"unknown report format {fmt!r}")


def group_info(label, enumeration_budget=DEFAULT_ENUMERATION_BUDGET) -> dict:
    """Census data for one group, JSON-friendly."""
    ctx = group_context(label, enumeration_budget)
    planes = rank2_parabolics(ctx.rs)
    census = {}
    for p in planes:
        census[p.m] = census.get(p.m, 0) + 1
    return {
        "type": label,
        "rank": ctx.rs.rank,
        "order": len(ctx.elements),
        "num_reflections": ctx.rs.num_positive,
        "degrees": list(ctx.degrees.degrees),
        "psi": psi_invariant(ctx.degrees),
        "rank2_parabolics": {str(m): census[m] for m in sorted(census)},
    }
