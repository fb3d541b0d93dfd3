"""Orchestration: run the stages, compare against the claims registry, emit a certificate."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field

from . import __version__
from .certified import MAX_PRECISION, PrecisionError
from .claims import ClaimResult, compare, error_result, integer_bound, load_registry
from .contfrac import cf_expand, find_convergent_exceeding, tau, tau_inverse
from .field import DEFAULT_PRECISION, build_constants
from .logbounds import bound_chain, m_lt_2n_from, max_m_for_n, ratio
from .reduction import PRINTED_M, ReductionReport, prefactors, rigorous_plan, run_reductions
from .search import DEFAULT_CONVENTION, THEOREM1, IndexConvention, SearchWindow, compare_conventions, verify_theorem

STAGES = ("search", "cf", "bounds", "reduce", "certify")
FORMATS = ("json", "csv", "text")
DEPENDS = {"search": (), "cf": (), "bounds": (), "reduce": ("bounds",), "certify": ("bounds", "reduce")}

EXIT_VERIFIED, EXIT_MISMATCH, EXIT_ERROR, EXIT_BAD_CONFIG = 0, 1, 2, 3

N_ASSUMED = 300  # the proof argues by contradiction from n >= 300
CF_CHECK_TERMS = 110


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class PipelineConfig:
    precision_bits: int = DEFAULT_PRECISION
    window: SearchWindow = field(default_factory=SearchWindow)
    convention: IndexConvention = DEFAULT_CONVENTION
    output_format: str = "json"
    stages: tuple[str, ...] = STAGES
    workers: int = 1

    def __post_init__(self):
        if not 64 <= self.precision_bits <= MAX_PRECISION:
            raise ConfigError(f"precision_bits must lie in [64, {MAX_PRECISION}]")
        if not self.stages:
            raise ConfigError("at least one stage is required")
        bad = [s for s in self.stages if s not in STAGES]
        if bad:
            raise ConfigError(f"unknown stages {bad}")
        if self.output_format not in FORMATS:
            raise ConfigError(f"unknown format {self.output_format!r}")
        if self.workers < 1:
            raise ConfigError("workers must be positive")
        if self.window.empty:
            raise ConfigError("search window is empty")

    def echo(self) -> dict:
        return {
            "precision_bits": self.precision_bits,
            "window": asdict(self.window),
            "convention": self.convention.name,
            "output_format": self.output_format,
            "stages": list(self.stages),
        }


@dataclass
class Certificate:
    tool: str
    version: str
    registry_version: str
    config: dict
    claims: list[ClaimResult]
    verdict: str
    notes: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "tool": self.tool,
            "version": self.version,
            "registry_version": self.registry_version,
            "config": self.config,
            "verdict": self.verdict,
            "claims": [c.to_dict() for c in self.claims],
            "notes": self.notes,
        }

    @classmethod
    def from_dict(cls, d: dict) -> Certificate:
        return cls(
            tool=d["tool"],
            version=d["version"],
            registry_version=d["registry_version"],
            config=d["config"],
            claims=[ClaimResult.from_dict(c) for c in d["claims"]],
            verdict=d["verdict"],
            notes=d.get("notes", {}),
        )

    def claim(self, claim_id: str) -> ClaimResult:
        for c in self.claims:
            if c.id == claim_id:
                return c
        raise KeyError(claim_id)

    @property
    def exit_code(self) -> int:
        return {"verified": EXIT_VERIFIED, "mismatch": EXIT_MISMATCH}.get(self.verdict, EXIT_ERROR)


def verdict_of(claims: list[ClaimResult]) -> str:
    statuses = {c.status for c in claims}
    if "error" in statuses:
        return "error"
    if "mismatch" in statuses:
        return "mismatch"
    return "verified"


def _closure(stages) -> list[str]:
    need = set()
    for s in stages:
        need.add(s)
        need.update(DEPENDS[s])
    return [s for s in STAGES if s in need]


class PipelineRun:
    def __init__(self, config: PipelineConfig):
        self.config = config
        self.registry = load_registry()
        self.results: dict[str, ClaimResult] = {}
        self.notes: dict = {}
        self.chain = None
        self.replay_red: ReductionReport | None = None
        self.rigorous_red: ReductionReport | None = None

    def put(self, claim_id: str, value, detail: str = "") -> None:
        self.results[claim_id] = compare(self.registry[claim_id], value, detail)

    def fail_stage(self, stage: str, exc: Exception) -> None:
        for cid in self.registry.ids(stage):
            if cid not in self.results:
                self.results[cid] = error_result(self.registry[cid], f"{type(exc).__name__}: {exc}")

    # -- stages -------------------------------------------------------

    def search(self) -> None:
        cfg = self.config
        cmp = verify_theorem(cfg.window, cfg.convention)
        bad = [r.c for r in cmp.records if not r.verify()]
        self.put("theorem1_set", cmp.found, f"window {cfg.window}, convention {cfg.convention.name}"
                 + (f"; witness failures {bad}" if bad else ""))
        consts = build_constants(max(cfg.precision_bits, DEFAULT_PRECISION))
        m_cap = integer_bound(max_m_for_n(N_ASSUMED, consts), "<=")
        full = SearchWindow(cfg.convention.m_min, m_cap, 0, N_ASSUMED)
        self.put("theorem1_set_complete_window", verify_theorem(full, cfg.convention).found,
                 f"m <= {m_cap}, n <= {N_ASSUMED}")
        self.notes["conventions"] = {
            c.convention.name: {"count": len(c.found), "missing": c.missing, "extra": c.extra}
            for c in compare_conventions(cfg.window)
        }

    def cf(self) -> None:
        bits = self.config.precision_bits
        e = cf_expand(tau, CF_CHECK_TERMS, start_bits=bits)
        ei = cf_expand(tau_inverse, CF_CHECK_TERMS, start_bits=bits)
        self.notes["cf_precision_bits"] = e.precision_bits
        self.put("cf_tau_prefix", e.quotients[:13])
        self.put("cf_inverse_tau_prefix", ei.quotients[:14])
        self.put("tau_ratio_digits", ratio(build_constants(bits)))
        idx, p, q = find_convergent_exceeding(e, 6 * PRINTED_M)
        self.put("convergent_index", idx)
        self.put("convergent_q", str(q))
        self.put("convergent_p", str(p))
        self.put("convergent_q_exceeds_6M", q > 6 * PRINTED_M, f"q = {q}")
        idx_i, _, q_i = find_convergent_exceeding(ei, 6 * PRINTED_M)
        self.put("cf_inverse_convergent_index", idx_i, f"q = {q_i}")

    def bounds(self) -> None:
        consts = build_constants(max(self.config.precision_bits, DEFAULT_PRECISION))
        self.chain = bound_chain(consts)
        for r in self.chain.stages:
            self.results[r.id] = r
        w = max_m_for_n(N_ASSUMED, consts)
        self.put("search_window_m", integer_bound(w, "<="), f"m < {w.to_str(8)} whenever n < {N_ASSUMED}")
        self.put("index_window_m_lt_2n", m_lt_2n_from(N_ASSUMED, consts))
        self.notes["n_upper_strict"] = f"{float(self.chain.n_upper_strict):.6e}"

    def reduce(self) -> None:
        bits = self.config.precision_bits
        workers = self.config.workers
        rep = run_reductions(bits, workers=workers)
        self.replay_red = rep
        self.notes["reduction_precision_bits"] = rep.bits
        self.notes["reduction_escalations"] = rep.escalations
        consts = rep.context.consts
        for cid, val in prefactors(consts).items():
            if cid in self.registry.ids("reduce"):
                self.put(cid, val)
        c = rep.campaigns
        self._campaign_claims(c)
        self.put("min_gap_assumption", None)
        self.put("nonvanishing_assumption", None)
        self.notes["fallbacks"] = {
            cid: {"count": len(r.family.fallbacks), "convergents": sorted({i for _, i in r.family.fallbacks})}
            for cid, r in c.items()
        }

    def _campaign_claims(self, c) -> None:
        def eps(cid):
            return c[cid].min_epsilon

        def w_detail(cid, name):
            w = c[cid].bounds[name]
            return "w < " + (w.to_str(8) if w is not None else "undetermined")

        self.put("gamma_pos_eps", eps("gamma_pos"))
        self.put("gamma_pos_n_bound", c["gamma_pos"].derived["n"], w_detail("gamma_pos", "n"))
        self.put("gamma_pos_m_bound", c["gamma_pos"].derived["m"], w_detail("gamma_pos", "m"))
        self.put("gamma_neg_eps", eps("gamma_neg"))
        self.put("gamma_neg_n_bound", c["gamma_neg"].derived["n"], w_detail("gamma_neg", "n"))
        self.put("gamma_neg_m_bound", c["gamma_neg"].derived["m"], w_detail("gamma_neg", "m"))
        self.put("gamma1_pos_eps", eps("gamma1_pos"), self._fallback_note(c["gamma1_pos"]))
        self.put("gamma1_pos_bound", c["gamma1_pos"].derived["m"], w_detail("gamma1_pos", "m"))
        self.put("gamma1_neg_bound", c["gamma1_neg"].derived["m"], w_detail("gamma1_neg", "m"))
        self.put("gamma2_pos_eps", eps("gamma2_pos"), self._fallback_note(c["gamma2_pos"]))
        self.put("gamma2_pos_bound", c["gamma2_pos"].derived["n"], w_detail("gamma2_pos", "n"))
        self.put("gamma2_neg_eps", eps("gamma2_neg"), self._fallback_note(c["gamma2_neg"]))
        self.put("gamma2_neg_bound", c["gamma2_neg"].derived["n"], w_detail("gamma2_neg", "n"))
        self.put("gamma3_eps", eps("gamma3_pos"), self._fallback_note(c["gamma3_pos"]))
        self.put("gamma3_n_bound", c["gamma3_pos"].derived["n"], w_detail("gamma3_pos", "n"))
        neg = c["gamma3_neg"].derived["n"]
        self.put("gamma3_neg_n_bound", neg is not None and neg <= N_ASSUMED,
                 f"n < {neg}, min epsilon {eps('gamma3_neg').to_str(6)}")

    @staticmethod
    def _fallback_note(r) -> str:
        if not r.family.fallbacks:
            return "all members reduce at the first convergent with q > 6M"
        idx = sorted({i for _, i in r.family.fallbacks})
        return (f"{len(r.family.fallbacks)} of {r.family_size} members need a later convergent {idx}; "
                f"minimum over the rest")

    def certify(self) -> None:
        rep = self.replay_red
        final = rep.final_bound()
        self.put("final_contradiction", final is not None and final <= N_ASSUMED,
                 f"both signs of Gamma_3 give n < {final}")
        n_strict = int(math.ceil(self.chain.n_upper_strict))
        rig = run_reductions(rep.bits, plan_for=rigorous_plan(n_strict), chained=True, workers=self.config.workers)
        self.rigorous_red = rig
        rf = rig.final_bound()
        plan = rig.plan
        self.put(
            "rigorous_closure",
            rf is not None and rf <= N_ASSUMED,
            f"M = {n_strict:.3e} (2M for u = m), re-derived prefactors, ranges k <= {plan.k_gamma3}, "
            f"l <= {plan.l_gamma3}: n < {rf}",
        )
        self.notes["rigorous_bounds"] = {cid: r.derived for cid, r in rig.campaigns.items()}


def run_pipeline(config: PipelineConfig) -> Certificate:
    return execute(config)[0]


def execute(config: PipelineConfig) -> tuple[Certificate, PipelineRun]:
    """Run the pipeline and also return the intermediate results (used for plots)."""
    run = PipelineRun(config)
    failed: set[str] = set()
    for stage in _closure(config.stages):
        if any(dep in failed for dep in DEPENDS[stage]):
            failed.add(stage)
            run.fail_stage(stage, RuntimeError("a prerequisite stage failed"))
            continue
        try:
            getattr(run, stage)()
        except (PrecisionError, ArithmeticError, ValueError, LookupError) as exc:
            failed.add(stage)
            run.fail_stage(stage, exc)

    wanted = set(config.stages)
    claims = [run.results[c.id] for c in run.registry.claims if c.stage in wanted and c.id in run.results]
    return Certificate(
        tool="pillaicert",
        version=__version__,
        registry_version=run.registry.version,
        config=config.echo(),
        claims=claims,
        verdict=verdict_of(claims),
        notes=_json_clean(run.notes),
    ), run


def _json_clean(obj):
    return json.loads(json.dumps(obj, sort_keys=True))


# -- emitters -------------------------------------------------------------


def emit(cert: Certificate, fmt: str = "json") -> bytes:
    if fmt == "json":
        return (json.dumps(cert.to_dict(), indent=2) + "\n").encode()
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["id", "printed", "corrected", "recomputed", "tolerance", "status", "detail"])
        for c in cert.claims:
            w.writerow([c.id, _cell(c.printed), _cell(c.corrected), _cell(c.recomputed),
                        _cell(c.tolerance), c.status, c.detail])
        return buf.getvalue().encode()
    if fmt == "text":
        return render_text(cert).encode()
    raise ValueError(f"unknown format {fmt!r}")


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (list, dict, bool)):
        return json.dumps(v)
    return str(v)


def render_text(cert: Certificate) -> str:
    lines = [
        f"{cert.tool} {cert.version} (claims registry v{cert.registry_version})",
        f"verdict: {cert.verdict}",
        "",
    ]
    width = max((len(c.id) for c in cert.claims), default=10)
    for c in cert.claims:
        shown = c.recomputed if not isinstance(c.recomputed, list) or len(c.recomputed) <= 14 else f"<{len(c.recomputed)} values>"
        printed = c.printed if not isinstance(c.printed, list) or len(c.printed) <= 14 else f"<{len(c.printed)} values>"
        lines.append(f"{c.status:<10} {c.id:<{width}}  printed {printed}  recomputed {shown}")
        if c.status != "match" and c.detail:
            lines.append(f"{'':<10} {'':<{width}}  {c.detail}")
    for cid in ("theorem1_set", "theorem1_set_complete_window"):
        try:
            found = cert.claim(cid).recomputed
        except KeyError:
            continue
        if isinstance(found, list):
            lines += ["", f"{cid} ({len(found)} values):", " ".join(str(v) for v in sorted(found))]
    counts = {}
    for c in cert.claims:
        counts[c.status] = counts.get(c.status, 0) + 1
    lines += ["", "summary: " + ", ".join(f"{k} {v}" for k, v in sorted(counts.items()))]
    return "\n".join(lines) + "\n"


def parse_certificate(data: bytes | str) -> Certificate:
    return Certificate.from_dict(json.loads(data))


__all__ = [
    "PipelineConfig", "Certificate", "run_pipeline", "emit", "parse_certificate", "ConfigError",
    "STAGES", "FORMATS", "THEOREM1", "EXIT_VERIFIED", "EXIT_MISMATCH", "EXIT_ERROR", "EXIT_BAD_CONFIG",
]
