"""Three-valued embedding decisions between N, E (= F) and B scales.

Every decision reduces to statements about sequences of the form
2^{jE} (j+1)^A, handled by the :class:`~morrey_embed.weights.Growth` calculus.
Each verdict carries a trace: one entry per evaluated condition with a
descriptive id, the rule in words, its truth value and numeric evidence
(exact dyadic values on 0 <= j <= 80 plus the asymptotic law used beyond).
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .dyadic import PreconditionError
from .weights import (
    INF, LEX_TOL, End, Growth, InconclusiveError, Limit, Power, Tabulated, WeightFunction,
    WeightRangeError, check_gp, check_intc, inf_is_zero, limit_behavior, parse_number,
    ratio_growth, rphi, weight_from_json,
)
from .witnesses import WitnessFamily

SCHEMA = "morrey-embed/1"
SCALES = ("N", "E", "B", "F")
# exact evaluation window for α_j and the condition sequences
EXACT_J = 80
EXACT_NU_MIN = -80


def _num(x: float):
    """JSON-friendly number (oo -> "inf")."""
    if isinstance(x, float) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def _inv(q: float) -> float:
    return 0.0 if q == INF else 1.0 / q


def _from_inv(x: float) -> float:
    return INF if x <= 0 else 1.0 / x


class Decision(str, Enum):
    HOLDS = "Holds"
    FAILS = "Fails"
    INCONCLUSIVE = "Inconclusive"

    @property
    def exit_code(self) -> int:
        return {"Holds": 0, "Fails": 1, "Inconclusive": 2}[self.value]


@dataclass(frozen=True)
class SpaceSpec:
    """One smoothness space: scale, smoothness s, integrability p, fine index q, weight φ."""

    scale: str
    s: float
    p: float
    q: float
    phi: WeightFunction
    d: int | None = None

    def __post_init__(self):
        if self.scale not in SCALES:
            raise ValueError(f"scale must be one of {SCALES}, got {self.scale!r}")
        if not (0 < self.p < INF):
            raise ValueError("p must be a positive real")
        if not self.q > 0:
            raise ValueError("q must be positive or inf")
        if not math.isfinite(self.s):
            raise ValueError("s must be finite")
        if self.d is None:
            object.__setattr__(self, "d", self.phi.d)
        elif self.d != self.phi.d:
            raise ValueError(f"spec dimension d={self.d} disagrees with the weight's d={self.phi.d}")
        gp = check_gp(self.phi, self.p)
        if not gp:
            raise PreconditionError(f"phi is not in G_p for p={self.p} (violating pair {gp.witness})")
        if self.scale in ("E", "F") and self.q < INF:
            try:
                ok = check_intc(self.phi)
            except InconclusiveError as exc:
                raise PreconditionError(f"cannot verify the lower growth condition: {exc}") from exc
            if not ok:
                raise PreconditionError("E/F scales with finite q need phi(t)/phi(r) >= c (t/r)^eps, t >= r")

    @property
    def seq_scale(self) -> str:
        return {"N": "n", "E": "e", "F": "f", "B": "b"}[self.scale]

    def replace(self, **changes) -> "SpaceSpec":
        return dataclasses.replace(self, **changes)

    def to_json(self) -> dict:
        return {"scale": self.scale, "s": self.s, "p": self.p, "q": _num(self.q),
                "phi": self.phi.to_json(), "d": self.d}

    @classmethod
    def from_json(cls, obj: dict) -> "SpaceSpec":
        if not isinstance(obj, dict):
            raise ValueError("space spec must be a JSON object")
        unknown = set(obj) - {"scale", "s", "p", "q", "phi", "d", "schema"}
        if unknown:
            raise ValueError(f"unknown space-spec field(s): {sorted(unknown)}")
        missing = {"scale", "s", "p", "q", "phi"} - set(obj)
        if missing:
            raise ValueError(f"space spec missing field(s): {sorted(missing)}")
        d = obj.get("d")
        if d is not None and (isinstance(d, bool) or not isinstance(d, int)):
            raise ValueError("space-spec field 'd' must be an integer")
        phi = weight_from_json(obj["phi"])
        return cls(str(obj["scale"]).upper(), parse_number(obj["s"]), parse_number(obj["p"]),
                   parse_number(obj["q"]), phi, d)


@dataclass(frozen=True)
class TraceEntry:
    condition: str
    rule: str
    truth: bool | None
    evidence: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        ev = {k: (_num(v) if isinstance(v, float) else v) for k, v in self.evidence.items()}
        return {"condition": self.condition, "rule": self.rule, "truth": self.truth, "evidence": ev}

    @classmethod
    def from_json(cls, obj: dict) -> "TraceEntry":
        unknown = set(obj) - {"condition", "rule", "truth", "evidence"}
        if unknown:
            raise ValueError(f"unknown trace field(s): {sorted(unknown)}")
        return cls(obj["condition"], obj["rule"], obj["truth"], dict(obj.get("evidence", {})))


@dataclass
class EmbeddingVerdict:
    decision: Decision
    trace: list = field(default_factory=list)
    witness: WitnessFamily | None = None
    compact: bool = False

    def __post_init__(self):
        self.decision = Decision(self.decision)
        if self.decision == Decision.HOLDS and self.compact:
            raise ValueError("a positive verdict is never compact")

    @property
    def exit_code(self) -> int:
        return self.decision.exit_code

    def condition(self, cid: str) -> TraceEntry | None:
        for t in self.trace:
            if t.condition == cid:
                return t
        return None

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "decision": self.decision.value,
            "compact": self.compact,
            "trace": [t.to_json() for t in self.trace],
            "witness": self.witness.to_json() if self.witness is not None else None,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "EmbeddingVerdict":
        unknown = set(obj) - {"schema", "decision", "compact", "trace", "witness"}
        if unknown:
            raise ValueError(f"unknown verdict field(s): {sorted(unknown)}")
        if obj.get("schema") != SCHEMA:
            raise ValueError(f"unsupported schema {obj.get('schema')!r}")
        w = obj.get("witness")
        return cls(Decision(obj["decision"]), [TraceEntry.from_json(t) for t in obj.get("trace", [])],
                   WitnessFamily.from_json(w) if w is not None else None, bool(obj.get("compact", False)))


# ---------------------------------------------------------------------------
# derived quantities

def _safe_eval(phi: WeightFunction, nu: int):
    try:
        return phi.eval(nu)
    except WeightRangeError:
        return None


def _level_window(*phis):
    lo, hi = EXACT_NU_MIN, EXACT_J
    for phi in phis:
        if isinstance(phi, Tabulated):
            lo, hi = max(lo, phi.nu_min), min(hi, phi.nu_max)
    return lo, hi


@dataclass(frozen=True)
class DerivedQuantities:
    """ρ, exact α_j (j = 0..j_max), its asymptotic law, q*, q' and r_{φ1}."""

    rho: float
    alpha: tuple
    alpha_law: Growth | None
    q_star: float
    q_prime: float
    r_phi1: float

    def to_json(self) -> dict:
        law = None if self.alpha_law is None else list(self.alpha_law.as_tuple())
        return {"rho": self.rho, "alpha_exact_last": self.alpha[-1] if self.alpha else None,
                "alpha_exact_levels": len(self.alpha), "alpha_law": law,
                "q_star": _num(self.q_star), "q_prime": _num(self.q_prime), "r_phi1": _num(self.r_phi1)}


def alpha_exact(phi2: WeightFunction, phi1: WeightFunction, rho: float) -> tuple:
    """α_j = sup_{ν<=j} φ2(2^-ν)/φ1(2^-ν)^ρ for j = 0..80 (ν truncated at -80 or the table)."""
    lo, hi = _level_window(phi1, phi2)
    ratios = {}
    for nu in range(lo, hi + 1):
        a, b = _safe_eval(phi2, nu), _safe_eval(phi1, nu)
        if a is not None and b is not None:
            ratios[nu] = math.log2(a) - rho * math.log2(b)
    head = max((v for nu, v in ratios.items() if nu <= 0), default=0.0)
    out, run = [], head
    for j in range(0, hi + 1):
        if j in ratios:
            run = max(run, ratios[j])
        out.append(2.0 ** run)
    return tuple(out)


def alpha_law(phi2: WeightFunction, phi1: WeightFunction, rho: float) -> Growth:
    """Growth of α_j: that of the ratio when it tends to oo, else bounded (α_j >= 1)."""
    g = ratio_growth(phi2, phi1, rho, End.ZERO)
    return g if g.order() > 0 else Growth(0.0, 0.0)


def derived(src: SpaceSpec, tgt: SpaceSpec) -> DerivedQuantities:
    rho = min(1.0, src.p / tgt.p)
    try:
        law = alpha_law(tgt.phi, src.phi, rho)
    except InconclusiveError:
        law = None
    return DerivedQuantities(
        rho, alpha_exact(tgt.phi, src.phi, rho), law,
        _from_inv(max(_inv(tgt.q) - _inv(src.q), 0.0)),
        _from_inv(max(1.0 - _inv(src.q), 0.0)),
        rphi(src.phi),
    )


def _exact_log2_terms(fn, hi: int = EXACT_J) -> list:
    out = []
    for j in range(0, hi + 1):
        try:
            out.append(fn(j))
        except WeightRangeError:
            break
    return out


def _seq_evidence(growth: Growth, log2_terms: list, r: float) -> dict:
    ev = {"law_exponent": growth.E, "law_log_exponent": growth.A, "ell": _num(r)}
    if log2_terms:
        ev["exact_levels"] = len(log2_terms)
        ev["exact_log2_max"] = max(log2_terms)
        ev["exact_log2_last"] = log2_terms[-1]
    return ev


def _entry_seq(cid: str, rule: str, growth: Growth, r: float, log2_fn=None) -> TraceEntry:
    terms = _exact_log2_terms(log2_fn) if log2_fn is not None else []
    return TraceEntry(cid, rule, growth.in_ell(r), _seq_evidence(growth, terms, r))


def _entry_sup(cid: str, rule: str, growth: Growth, log2_fn=None, levels=None) -> TraceEntry:
    ev = {"law_exponent": growth.E, "law_log_exponent": growth.A}
    if log2_fn is not None:
        vals = []
        for nu in levels:
            try:
                vals.append(log2_fn(nu))
            except WeightRangeError:
                pass
        if vals:
            ev["exact_log2_max"] = max(vals)
    return TraceEntry(cid, rule, growth.bounded(), ev)


def _large_scale_entry(cid: str, phi2, phi1, rho) -> TraceEntry:
    g = ratio_growth(phi2, phi1, rho, End.INFINITY)
    fn = lambda nu: math.log2(phi2.eval(nu)) - rho * math.log2(phi1.eval(nu))  # noqa: E731
    return _entry_sup(cid, f"sup_(t>=1) phi2(t)/phi1(t)^{rho:g} < oo", g, fn, range(EXACT_NU_MIN, 1))


def _ratio_seq(src: SpaceSpec, tgt: SpaceSpec, rho: float, with_alpha: bool, extra_exp: float = 0.0,
               phi1_power: float = 0.0):
    """Growth and exact log2 terms of 2^{j(s2-s1+extra)} [α_j or φ2/φ1^ρ] φ1(2^-j)^{phi1_power}."""
    g1 = src.phi.growth(End.ZERO)
    base = alpha_law(tgt.phi, src.phi, rho) if with_alpha else ratio_growth(tgt.phi, src.phi, rho, End.ZERO)
    growth = Growth(tgt.s - src.s + extra_exp) * base * (g1 ** phi1_power)
    alpha = alpha_exact(tgt.phi, src.phi, rho) if with_alpha else None

    def log2_term(j):
        core = math.log2(alpha[j]) if with_alpha else math.log2(tgt.phi.eval(j)) - rho * math.log2(src.phi.eval(j))
        if alpha is not None and j >= len(alpha):
            raise WeightRangeError("outside exact window")
        return j * (tgt.s - src.s + extra_exp) + core + phi1_power * math.log2(src.phi.eval(j))

    return growth, log2_term


def _same_weight(a: WeightFunction, b: WeightFunction) -> bool:
    """Equal after normalisation (the factor is irrelevant)."""
    def core(w):
        return {k: v for k, v in w.params().items() if k != "factor"}
    return type(a) is type(b) and a.d == b.d and core(a) == core(b)


def _witness_single_coeff(src: SpaceSpec, tgt: SpaceSpec) -> WitnessFamily | None:
    """Single coefficients λ_{j,0} give ratio 2^{j(s2-s1)} φ2(2^-j)/φ1(2^-j) in every scale."""
    g = Growth(tgt.s - src.s) * ratio_growth(tgt.phi, src.phi, 1.0, End.ZERO)
    if g.order() > 0:
        return WitnessFamily("single_coeff", {"d": src.d})
    return None


def _witness_for_smoothness(src: SpaceSpec, tgt: SpaceSpec) -> WitnessFamily | None:
    if tgt.s > src.s:
        return WitnessFamily("single_level", {"s1": src.s, "d": src.d})
    return _witness_single_coeff(src, tgt)


def _profile_error(exc: Exception) -> EmbeddingVerdict:
    return EmbeddingVerdict(Decision.INCONCLUSIVE, [TraceEntry(
        "asymptotic_profile_available", "every weight needs a declared asymptotic profile", False,
        {"error": str(exc)})])


def _guard_profile(fn):
    def wrapped(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except InconclusiveError as exc:
            return _profile_error(exc)
    wrapped.__name__ = fn.__name__
    wrapped.__doc__ = fn.__doc__
    wrapped.__wrapped__ = fn
    return wrapped


def _check_scales(src, tgt, allowed_src, allowed_tgt, what):
    if src.scale not in allowed_src or tgt.scale not in allowed_tgt:
        raise ValueError(f"{what} needs source scale in {allowed_src} and target in {allowed_tgt}")
    if src.d != tgt.d:
        raise ValueError("source and target dimensions differ")


# ---------------------------------------------------------------------------
# N -> N

@_guard_profile
def decide_n_to_n(src: SpaceSpec, tgt: SpaceSpec) -> EmbeddingVerdict:
    """Besov-Morrey into Besov-Morrey: large-scale ratio bound plus an ℓ_{q*} condition."""
    _check_scales(src, tgt, ("N",), ("N",), "decide_n_to_n")
    dq = derived(src, tgt)
    rho = dq.rho
    trace = [TraceEntry("derived_quantities", "rho = min(1, p1/p2), 1/q* = (1/q2 - 1/q1)_+", None, dq.to_json())]
    if src.q == INF or tgt.q == INF:
        trace.append(TraceEntry("infinite_fine_index_extension",
                                "q = oo handled by the same conditions through N_{p,oo} = B_{p,oo}", None,
                                {"q1": _num(src.q), "q2": _num(tgt.q)}))
    large = _large_scale_entry("large_scale_ratio_bounded", tgt.phi, src.phi, rho)
    growth, fn = _ratio_seq(src, tgt, rho, True, phi1_power=rho - 1.0)
    seq = _entry_seq("alpha_sequence_in_ell_qstar",
                     "{2^(j(s2-s1)) alpha_j phi1(2^-j)^(rho-1)} in ell_q*", growth, dq.q_star, fn)
    trace += [large, seq]
    if large.truth and seq.truth:
        return EmbeddingVerdict(Decision.HOLDS, trace)
    witness = None
    if not seq.truth:
        if src.s == tgt.s and src.p == tgt.p and _same_weight(src.phi, tgt.phi) and tgt.q < src.q:
            witness = WitnessFamily("fine_index", {"s": src.s, "q1": src.q, "q2": tgt.q, "d": src.d})
        else:
            witness = _witness_for_smoothness(src, tgt)
    return EmbeddingVerdict(Decision.FAILS, trace, witness)


# ---------------------------------------------------------------------------
# E -> E (F identified with E)

def _e_to_e_equal_p(src, tgt, trace):
    """p1 >= p2: the running-sup form and the pointwise form must agree."""
    large = _large_scale_entry("large_scale_ratio_bounded", tgt.phi, src.phi, 1.0)
    g_alpha, fn_alpha = _ratio_seq(src, tgt, 1.0, True)
    alpha_form = _entry_seq("alpha_sequence_bounded", "{2^(j(s2-s1)) alpha_j} in ell_oo", g_alpha, INF, fn_alpha)
    g_pt, fn_pt = _ratio_seq(src, tgt, 1.0, False)
    pointwise = _entry_seq("pointwise_ratio_bounded", "{2^(j(s2-s1)) phi2(2^-j)/phi1(2^-j)} in ell_oo",
                           g_pt, INF, fn_pt)
    s_ok = src.s > tgt.s or (src.s == tgt.s and src.q <= tgt.q)
    smooth = TraceEntry("smoothness_and_fine_index", "s1 > s2, or s1 = s2 and q1 <= q2", s_ok,
                        {"s1": src.s, "s2": tgt.s, "q1": _num(src.q), "q2": _num(tgt.q)})
    fine_ok = src.s != tgt.s or src.q <= tgt.q
    holds_alpha = large.truth and alpha_form.truth and fine_ok
    holds_point = large.truth and pointwise.truth and s_ok
    agree = TraceEntry("alpha_and_pointwise_forms_agree",
                       "running-sup criterion and pointwise criterion give the same verdict",
                       holds_alpha == holds_point, {"alpha_form": holds_alpha, "pointwise_form": holds_point})
    trace += [large, alpha_form, pointwise, smooth, agree]
    if not agree.truth:
        return EmbeddingVerdict(Decision.INCONCLUSIVE, trace)
    if holds_alpha:
        return EmbeddingVerdict(Decision.HOLDS, trace)
    witness = None
    if tgt.s > src.s:
        witness = WitnessFamily("single_level", {"s1": src.s, "d": src.d})
    elif not pointwise.truth:
        witness = _witness_single_coeff(src, tgt)
    elif src.s == tgt.s and src.q > tgt.q:
        witness = WitnessFamily("fine_index", {"s": src.s, "q1": src.q, "q2": tgt.q, "d": src.d})
    return EmbeddingVerdict(Decision.FAILS, trace, witness)


def _e_to_e_larger_p(src, tgt, trace):
    """p1 < p2: sufficient / necessary pair, equivalent when φ1 t^{-d/r} stays bounded at 0."""
    dq = derived(src, tgt)
    rho, r = dq.rho, dq.r_phi1
    d = src.d
    dr = 0.0 if r == INF else d / r
    local = limit_behavior(src.phi, r, End.ZERO) != Limit.INFINITE
    trace.append(TraceEntry("local_exponent_bounded", "lim_(t->0) phi1(t) t^(-d/r_phi1) < oo", local,
                            {"r_phi1": _num(r)}))
    large = _large_scale_entry("large_scale_ratio_bounded", tgt.phi, src.phi, rho)
    g_suf, fn_suf = _ratio_seq(src, tgt, rho, True, extra_exp=dr * (1 - rho))
    suff = _entry_seq("shifted_alpha_sequence_bounded",
                      "{2^(j(s2-s1+(d/r_phi1)(1-rho))) alpha_j} in ell_oo", g_suf, INF, fn_suf)
    g_nec, fn_nec = _ratio_seq(src, tgt, rho, True, phi1_power=rho - 1.0)
    nec = _entry_seq("weighted_alpha_sequence_bounded",
                     "{2^(j(s2-s1)) alpha_j phi1(2^-j)^(rho-1)} in ell_oo", g_nec, INF, fn_nec)
    trace += [large, suff, nec]
    sufficient = large.truth and suff.truth
    necessary = large.truth and nec.truth
    if local:
        trace.append(TraceEntry("sufficient_and_necessary_agree",
                                "under the bounded local exponent both sequence conditions coincide",
                                suff.truth == nec.truth, {}))
        decision = Decision.HOLDS if sufficient else Decision.FAILS
    elif sufficient:
        decision = Decision.HOLDS
    elif not necessary:
        decision = Decision.FAILS
    else:
        trace.append(TraceEntry("criterion_gap",
                                "sufficient condition fails, necessary condition holds, local exponent unbounded",
                                None, {}))
        decision = Decision.INCONCLUSIVE
    witness = _witness_for_smoothness(src, tgt) if decision == Decision.FAILS else None
    return EmbeddingVerdict(decision, trace, witness)


@_guard_profile
def decide_e_to_e(src: SpaceSpec, tgt: SpaceSpec) -> EmbeddingVerdict:
    """Triebel-Lizorkin-Morrey (E, identified with F) into the same scale."""
    _check_scales(src, tgt, ("E", "F"), ("E", "F"), "decide_e_to_e")
    rho = min(1.0, src.p / tgt.p)
    trace = [TraceEntry("integrability_ratio", "rho = min(1, p1/p2)", None, {"rho": rho})]
    if src.p >= tgt.p:
        return _e_to_e_equal_p(src, tgt, trace)
    return _e_to_e_larger_p(src, tgt, trace)


# ---------------------------------------------------------------------------
# B -> B

@_guard_profile
def decide_b_to_b(src: SpaceSpec, tgt: SpaceSpec) -> EmbeddingVerdict:
    """Besov-type into Besov-type: sufficient ℓ_{q2} and necessary ℓ_oo conditions."""
    _check_scales(src, tgt, ("B",), ("B",), "decide_b_to_b")
    rho = min(1.0, src.p / tgt.p)
    trace = [TraceEntry("integrability_ratio", "rho = min(1, p1/p2)", None, {"rho": rho})]
    if src.p == tgt.p and _same_weight(src.phi, tgt.phi):
        # only s and q move: Hölder over the levels inside each P, exact in both directions
        q_star = _from_inv(max(_inv(tgt.q) - _inv(src.q), 0.0))
        entry = _entry_seq("smoothness_sequence_in_ell_qstar", "{2^(j(s2-s1))} in ell_q* (equal p and phi)",
                           Growth(float(tgt.s - src.s)), q_star, lambda j: j * (tgt.s - src.s))
        trace.append(entry)
        if entry.truth:
            return EmbeddingVerdict(Decision.HOLDS, trace)
        if tgt.s > src.s:
            return EmbeddingVerdict(Decision.FAILS, trace, _witness_for_smoothness(src, tgt))
        return EmbeddingVerdict(Decision.FAILS, trace,
                                WitnessFamily("fine_index", {"s": src.s, "q1": src.q, "q2": tgt.q, "d": src.d}))
    large = _large_scale_entry("large_scale_ratio_bounded", tgt.phi, src.phi, rho)
    growth, fn = _ratio_seq(src, tgt, rho, True, phi1_power=rho - 1.0)
    suff = _entry_seq("alpha_sequence_in_ell_q2", "{2^(j(s2-s1)) alpha_j phi1(2^-j)^(rho-1)} in ell_q2",
                      growth, tgt.q, fn)
    nec = _entry_seq("alpha_sequence_bounded", "{2^(j(s2-s1)) alpha_j phi1(2^-j)^(rho-1)} in ell_oo",
                     growth, INF, fn)
    trace += [large, suff, nec]
    if large.truth and suff.truth:
        return EmbeddingVerdict(Decision.HOLDS, trace)
    if not (large.truth and nec.truth):
        return EmbeddingVerdict(Decision.FAILS, trace, _witness_for_smoothness(src, tgt))
    trace.append(TraceEntry("criterion_gap", "bounded but not ell_q2-summable: no sharp criterion known",
                            None, {"q2": _num(tgt.q)}))
    return EmbeddingVerdict(Decision.INCONCLUSIVE, trace)


# ---------------------------------------------------------------------------
# N versus B with identical parameters

class NBRelation(str, Enum):
    ALWAYS_EMBEDS = "AlwaysEmbeds"
    COINCIDE = "Coincide"
    PROPER_INCLUSION = "ProperInclusion"


@dataclass
class NBResult:
    relation: NBRelation
    trace: list
    witness: WitnessFamily | None = None

    def to_json(self) -> dict:
        return {"schema": SCHEMA, "relation": self.relation.value, "trace": [t.to_json() for t in self.trace],
                "witness": self.witness.to_json() if self.witness is not None else None}


def _same_params(a: SpaceSpec, b: SpaceSpec, fine=True) -> bool:
    same = a.s == b.s and a.p == b.p and _same_weight(a.phi, b.phi)
    return same and (a.q == b.q if fine else True)


def decide_n_vs_b(src: SpaceSpec, tgt: SpaceSpec) -> NBResult:
    """N ⊂ B always; equal iff q = oo or φ(t)t^{-d/p} has finite positive limits at both ends."""
    if src.scale != "N" or tgt.scale != "B" or not _same_params(src, tgt):
        raise ValueError("decide_n_vs_b needs N and B specs with identical (s, p, q, phi)")
    phi, p, q = src.phi, src.p, src.q
    trace = [TraceEntry("n_inside_b", "N^s_{phi,p,q} embeds into B^{s,phi}_{p,q}", True, {})]
    lim0 = limit_behavior(phi, p, End.ZERO)
    liminf = limit_behavior(phi, p, End.INFINITY)
    trace.append(TraceEntry("small_scale_limit", "lim_(t->0) phi(t) t^(-d/p)", lim0 == Limit.POSITIVE_FINITE,
                            {"limit": lim0.value}))
    trace.append(TraceEntry("large_scale_limit", "lim_(t->oo) phi(t) t^(-d/p)", liminf == Limit.POSITIVE_FINITE,
                            {"limit": liminf.value}))
    if q == INF:
        trace.append(TraceEntry("infinite_fine_index", "q = oo: the two spaces coincide", True, {}))
        return NBResult(NBRelation.COINCIDE, trace)
    if lim0 == Limit.POSITIVE_FINITE and liminf == Limit.POSITIVE_FINITE:
        return NBResult(NBRelation.COINCIDE, trace)
    if lim0 == Limit.INFINITE:
        w = WitnessFamily("local_blowup", {"phi": phi, "s": src.s, "p": p, "q": q})
    else:
        w = WitnessFamily("global_decay", {"phi": phi, "s": src.s, "p": p, "q": q, "exponent_source": "q"})
    return NBResult(NBRelation.PROPER_INCLUSION, trace, w)


# ---------------------------------------------------------------------------
# N <-> E with equal (s, p, φ)

@_guard_profile
def decide_n_e_fine(src: SpaceSpec, tgt: SpaceSpec) -> EmbeddingVerdict:
    """N_{q0} -> E_q or E_q -> N_{q0} for the same (s, p, φ)."""
    if not _same_params(src, tgt, fine=False):
        raise ValueError("decide_n_e_fine needs equal s, p and phi")
    phi, p = src.phi, src.p
    if src.scale == "N" and tgt.scale in ("E", "F"):
        q0, q = src.q, tgt.q
        ok = q0 <= min(p, q)
        trace = [TraceEntry("n_fine_index_small", "q0 <= min(p, q) gives N_{q0} into N_{min(p,q)} into E_q", ok,
                            {"q0": _num(q0), "p": p, "q": _num(q)})]
        return EmbeddingVerdict(Decision.HOLDS if ok else Decision.INCONCLUSIVE, trace)
    if src.scale not in ("E", "F") or tgt.scale != "N":
        raise ValueError("decide_n_e_fine compares scales N and E")
    q, q0 = src.q, tgt.q
    lim0 = limit_behavior(phi, p, End.ZERO)
    liminf = limit_behavior(phi, p, End.INFINITY)
    classical = lim0 != Limit.INFINITE and liminf != Limit.ZERO
    trace = [TraceEntry("classical_regime", "lim_(t->0) t^(-d/p)phi(t) < oo and lim_(t->oo) t^(-d/p)phi(t) > 0",
                        classical, {"small_scale_limit": lim0.value, "large_scale_limit": liminf.value})]
    if classical:
        ok = q0 >= max(p, q)
        trace.append(TraceEntry("n_fine_index_large", "q0 >= max(p, q)", ok,
                                {"q0": _num(q0), "p": p, "q": _num(q)}))
        witness = None
        if not ok and q0 < q:
            witness = WitnessFamily("fine_index", {"s": src.s, "q1": q, "q2": q0, "d": src.d})
        return EmbeddingVerdict(Decision.HOLDS if ok else Decision.FAILS, trace, None if ok else witness)
    ok = q0 == INF
    trace.append(TraceEntry("n_fine_index_infinite", "outside the classical regime only q0 = oo works", ok,
                            {"q0": _num(q0)}))
    if ok:
        return EmbeddingVerdict(Decision.HOLDS, trace)
    if lim0 == Limit.INFINITE:
        w = WitnessFamily("local_blowup", {"phi": phi, "s": src.s, "p": p, "q": q})
    else:
        w = WitnessFamily("global_decay", {"phi": phi, "s": src.s, "p": p, "q": q, "exponent_source": "p"})
    return EmbeddingVerdict(Decision.FAILS, trace, w)


# ---------------------------------------------------------------------------
# into bounded continuous functions

def _decay_seq(spec: SpaceSpec) -> tuple[Growth, callable]:
    """{2^{-js} φ(2^-j)^{-1}}: growth and exact log2 terms."""
    g = Growth(-spec.s) * spec.phi.growth(End.ZERO).inv()
    return g, (lambda j: -j * spec.s - math.log2(spec.phi.eval(j)))


@_guard_profile
def decide_into_continuous(src: SpaceSpec) -> EmbeddingVerdict:
    """Embedding of a space into the bounded uniformly continuous functions."""
    g, fn = _decay_seq(src)
    rule = lambda r: "{2^(-js) phi(2^-j)^(-1)} in ell_" + r  # noqa: E731
    phi, p, s, d = src.phi, src.p, src.s, src.d
    if src.scale == "N":
        qp = _from_inv(max(1.0 - _inv(src.q), 0.0))
        e = _entry_seq("decay_sequence_in_ell_qprime", rule("q'"), g, qp, fn)
        if e.truth:
            return EmbeddingVerdict(Decision.HOLDS, [e])
        gamma_r = src.q
        return EmbeddingVerdict(Decision.FAILS, [e], WitnessFamily("nested_dual", {"phi": phi, "s": s, "r": gamma_r}))
    trace = []
    l1 = _entry_seq("decay_sequence_in_ell_1", rule("1"), g, 1.0, fn)
    trace.append(l1)
    if src.scale == "B":
        if l1.truth:
            return EmbeddingVerdict(Decision.HOLDS, trace)
        qp = _from_inv(max(1.0 - _inv(src.q), 0.0))
        nec = _entry_seq("decay_sequence_in_ell_qprime", rule("q'") + " (needed since N embeds into B)",
                         g, qp, fn)
        trace.append(nec)
        if not nec.truth:
            return EmbeddingVerdict(Decision.FAILS, trace,
                                    WitnessFamily("nested_dual", {"phi": phi, "s": s, "r": src.q}))
        return EmbeddingVerdict(Decision.INCONCLUSIVE, trace)
    # E / F
    r = rphi(phi)
    pp = _from_inv(max(1.0 - 1.0 / p, 0.0))
    nec = _entry_seq("decay_sequence_in_ell_pprime", rule("p'"), g, pp, fn)
    trace.append(nec)
    if r == INF:
        trace.append(TraceEntry("local_exponent_finite", "r_phi < oo", False, {"r_phi": "inf"}))
        if l1.truth:
            return EmbeddingVerdict(Decision.HOLDS, trace)
        if not nec.truth:
            return EmbeddingVerdict(Decision.FAILS, trace, WitnessFamily("nested_dual", {"phi": phi, "s": s, "r": p}))
        return EmbeddingVerdict(Decision.INCONCLUSIVE, trace)
    dr = d / r
    global_ok = limit_behavior(phi, r, End.INFINITY) != Limit.ZERO
    local_ok = limit_behavior(phi, r, End.ZERO) != Limit.INFINITE
    trace.append(TraceEntry("large_scale_lower_bound", "lim_(t->oo) t^(-d/r_phi) phi(t) > 0", global_ok,
                            {"r_phi": r}))
    trace.append(TraceEntry("small_scale_upper_bound", "lim_(t->0) t^(-d/r_phi) phi(t) < oo", local_ok,
                            {"r_phi": r}))
    endpoint = abs(s - dr) <= LEX_TOL * max(1.0, abs(dr)) and abs(p - r) <= LEX_TOL * r and p <= 1
    above = s > dr + LEX_TOL * max(1.0, abs(dr))
    crit = TraceEntry("smoothness_above_threshold", "s > d/r_phi, or s = d/r_phi and p = r_phi <= 1",
                      above or endpoint, {"s": s, "d_over_r_phi": dr, "p": p})
    trace.append(crit)

    def failing():
        if abs(s - dr) <= LEX_TOL * max(1.0, abs(dr)) and p < r <= 1:
            w = WitnessFamily("nested_atoms", {"phi": phi, "s": s})
        else:
            w = WitnessFamily("nested_dual", {"phi": phi, "s": s, "r": p})
        return EmbeddingVerdict(Decision.FAILS, trace, w)

    if global_ok and local_ok:
        return EmbeddingVerdict(Decision.HOLDS, trace) if crit.truth else failing()
    if above or (endpoint and global_ok) or l1.truth:
        return EmbeddingVerdict(Decision.HOLDS, trace)
    if not nec.truth:
        return failing()
    if local_ok:
        # small-scale bound alone still forces s >= d/r_phi (p <= 1) or s > d/r_phi (p > 1)
        needed = (s >= dr - LEX_TOL) if p <= 1 else above
        trace.append(TraceEntry("smoothness_necessary", "s >= d/r_phi if p <= 1, s > d/r_phi if p > 1", needed, {}))
        if not needed:
            return failing()
    return EmbeddingVerdict(Decision.INCONCLUSIVE, trace)


# ---------------------------------------------------------------------------
# generalised Morrey spaces themselves

def _dominates(phi1, phi2) -> tuple[bool, dict]:
    """φ1 >= c φ2 on (0, oo): both ends by growth comparison, the middle by sampling."""
    ends = {e.value: ratio_growth(phi2, phi1, 1.0, e).bounded() for e in End}
    lo, hi = _level_window(phi1, phi2)
    lo, hi = max(lo, -40), min(hi, 40)
    worst = max(math.log2(phi2.eval(nu)) - math.log2(phi1.eval(nu)) for nu in range(lo, hi + 1))
    return all(ends.values()), {"zero_end_bounded": ends["zero"], "infinity_end_bounded": ends["infinity"],
                                "sampled_log2_max_ratio": worst}


@_guard_profile
def decide_morrey_inclusion(phi1: WeightFunction, p1: float, phi2: WeightFunction, p2: float) -> EmbeddingVerdict:
    """M_{φ1,p1} into M_{φ2,p2}: p1 >= p2 and φ1 >= c φ2, provided inf φ1 = 0."""
    for phi, p in ((phi1, p1), (phi2, p2)):
        if not check_gp(phi, p):
            raise PreconditionError(f"weight not in G_p for p={p}")
    hyp = inf_is_zero(phi1)
    trace = [TraceEntry("source_weight_vanishes", "inf_(t>0) phi1(t) = 0", hyp, {})]
    if not hyp:
        trace.append(TraceEntry("hypothesis_violated",
                                "with inf phi1 > 0 the source embeds into L_oo and the criterion does not apply",
                                None, {}))
        return EmbeddingVerdict(Decision.INCONCLUSIVE, trace)
    p_ok = p1 >= p2
    dom, ev = _dominates(phi1, phi2)
    trace.append(TraceEntry("integrability_order", "p1 >= p2", p_ok, {"p1": p1, "p2": p2}))
    trace.append(TraceEntry("weight_domination", "phi1 >= c phi2 on (0, oo)", dom, ev))
    return EmbeddingVerdict(Decision.HOLDS if (p_ok and dom) else Decision.FAILS, trace)


# ---------------------------------------------------------------------------
# classical power weights, decided independently

def classical_oracle_at2(u1, p1, s1, q1, u2, p2, s2, q2, d: int = 1) -> EmbeddingVerdict:
    """Power-weight criterion in terms of (u_i, p_i, s_i, q_i) only; independent of the weight calculus."""
    if not (0 < p1 < u1 < INF and 0 < p2 < u2 < INF):
        raise ValueError("needs 0 < p_i < u_i < oo")
    rho = min(1.0, p1 / p2)
    tol = LEX_TOL
    c_u = u1 / u2 <= rho + tol
    a, b = s1 - d / u1, s2 - d / u2
    c_gap = a > b + tol
    c_edge = abs(a - b) <= tol and u1 < u2 - tol
    c_same = abs(s1 - s2) <= tol and abs(u1 - u2) <= tol and q1 <= q2
    trace = [
        TraceEntry("morrey_exponent_ratio", "u1/u2 <= rho", c_u, {"u1_over_u2": u1 / u2, "rho": rho}),
        TraceEntry("differential_dimension_gap", "s1 - d/u1 > s2 - d/u2", c_gap, {"lhs": a, "rhs": b}),
        TraceEntry("differential_dimension_edge", "s1 - d/u1 = s2 - d/u2 and u1 < u2", c_edge, {}),
        TraceEntry("identical_smoothness", "s1 = s2, u1 = u2 and q1 <= q2", c_same, {}),
    ]
    ok = c_u and (c_gap or c_edge or c_same)
    return EmbeddingVerdict(Decision.HOLDS if ok else Decision.FAILS, trace)


def _is_classical(spec: SpaceSpec) -> bool:
    return isinstance(spec.phi, Power) and abs(spec.phi.u - spec.p) <= LEX_TOL * spec.p


@_guard_profile
def decide_cross_classical(src: SpaceSpec, tgt: SpaceSpec) -> EmbeddingVerdict:
    """E/F scale with a classical Triebel-Lizorkin space (φ = t^{d/p}) on one side.

    Routed through :func:`decide_e_to_e`; the simplified one-weight criteria are
    evaluated alongside and must agree.
    """
    _check_scales(src, tgt, ("E", "F"), ("E", "F"), "decide_cross_classical")
    if not (_is_classical(src) or _is_classical(tgt)):
        raise ValueError("one side must be classical: phi = Power(u = p)")
    verdict = decide_e_to_e(src, tgt)
    d = src.d
    s_ok = src.s > tgt.s or (src.s == tgt.s and src.q <= tgt.q)
    check = None
    if _is_classical(tgt) and src.p >= tgt.p:
        phi = src.phi
        low = (Growth(d / tgt.p) * phi.growth(End.INFINITY).inv()).bounded()
        seq = (Growth(tgt.s - src.s - d / tgt.p) * phi.growth(End.ZERO).inv()).in_ell(INF)
        check = ("classical_target_simplified", "phi(t) >= c t^(d/p2) for t >= 1, "
                 "{2^(j(s2-s1-d/p2)) phi(2^-j)^(-1)} bounded, s-condition", low and seq and s_ok)
    elif _is_classical(src) and src.p >= tgt.p:
        phi = tgt.phi
        up = (phi.growth(End.INFINITY) * Growth(-d / src.p)).bounded()
        seq = (Growth(tgt.s - src.s + d / src.p) * phi.growth(End.ZERO)).in_ell(INF)
        check = ("classical_source_simplified", "sup_(t>=1) t^(-d/p1) phi(t) < oo, "
                 "{2^(j(s2-s1+d/p1)) phi(2^-j)} bounded, s-condition", up and seq and s_ok)
    elif _is_classical(src):
        phi = tgt.phi
        seq = (Growth(tgt.s - src.s + d / src.p) * phi.growth(End.ZERO)).in_ell(INF)
        check = ("classical_source_simplified", "{2^(j(s2-s1+d/p1)) phi(2^-j)} bounded", seq)
    if check is not None and verdict.decision != Decision.INCONCLUSIVE:
        cid, rule, val = check
        agree = val == (verdict.decision == Decision.HOLDS)
        verdict.trace.append(TraceEntry(cid, rule, val, {"agrees_with_general_criterion": agree}))
        if not agree:
            raise AssertionError(f"simplified classical criterion disagrees with the general one ({cid})")
    return verdict


# ---------------------------------------------------------------------------
# dispatcher with elementary chains for mixed scales

def _is_e(spec):
    return spec.scale in ("E", "F")


def _sub(name: str, v: EmbeddingVerdict) -> TraceEntry:
    return TraceEntry(name, "auxiliary embedding decided separately", None,
                      {"decision": v.decision.value})


def _combine(trace, suff: EmbeddingVerdict | None, nec: EmbeddingVerdict | None, names) -> EmbeddingVerdict:
    if suff is not None:
        trace.append(_sub(names[0], suff))
        if suff.decision == Decision.HOLDS:
            return EmbeddingVerdict(Decision.HOLDS, trace)
    if nec is not None:
        trace.append(_sub(names[1], nec))
        if nec.decision == Decision.FAILS:
            return EmbeddingVerdict(Decision.FAILS, trace, nec.witness)
    return EmbeddingVerdict(Decision.INCONCLUSIVE, trace)


def decide(src: SpaceSpec, tgt) -> EmbeddingVerdict:
    """Decide src -> tgt for any pair of scales; ``tgt = "C"`` means bounded continuous functions."""
    if isinstance(tgt, str):
        if tgt.upper() not in ("C", "LINF"):
            raise ValueError(f"unknown target {tgt!r}")
        return decide_into_continuous(src)
    if src.d != tgt.d:
        raise ValueError("source and target dimensions differ")
    a, b = src.scale, tgt.scale
    if a == "N" and b == "N":
        return decide_n_to_n(src, tgt)
    if _is_e(src) and _is_e(tgt):
        return decide_e_to_e(src, tgt)
    if a == "B" and b == "B":
        return decide_b_to_b(src, tgt)
    if _same_params(src, tgt, fine=False) and {a, b} <= {"N", "E", "F"}:
        return decide_n_e_fine(src, tgt)
    if a == "N" and b == "B" and _same_params(src, tgt):
        nb = decide_n_vs_b(src, tgt)
        return EmbeddingVerdict(Decision.HOLDS, nb.trace)
    if a == "B" and b == "N" and _same_params(src, tgt):
        nb = decide_n_vs_b(tgt, src)
        trace = nb.trace + [TraceEntry("spaces_coincide", "B equals N for these parameters",
                                       nb.relation == NBRelation.COINCIDE, {"relation": nb.relation.value})]
        if nb.relation == NBRelation.COINCIDE:
            return EmbeddingVerdict(Decision.HOLDS, trace)
        return EmbeddingVerdict(Decision.FAILS, trace, nb.witness)
    return _decide_by_chains(src, tgt)


@_guard_profile
def _decide_by_chains(src: SpaceSpec, tgt: SpaceSpec) -> EmbeddingVerdict:
    """Mixed scales through the constant-1 embeddings
    N_q ⊂ B_q ⊂ N_oo,  N_{min(p,q)} ⊂ E_q ⊂ N_oo,  B_{min(p,q)} ⊂ E_q ⊂ B_{max(p,q)}.
    """
    a, b = src.scale, tgt.scale
    trace = [TraceEntry("mixed_scales", "decided through elementary embeddings between the scales", None,
                        {"source_scale": a, "target_scale": b})]
    as_n = lambda sp, q: sp.replace(scale="N", q=q)  # noqa: E731
    as_b = lambda sp, q: sp.replace(scale="B", q=q)  # noqa: E731
    p1, q1, p2, q2 = src.p, src.q, tgt.p, tgt.q
    if a == "N" and b == "B":
        return _combine(trace, decide_n_to_n(src, as_n(tgt, q2)), decide_n_to_n(src, as_n(tgt, INF)),
                        ("via_n_target", "via_n_infinity_target"))
    if a == "B" and b == "N":
        return _combine(trace, decide_n_to_n(as_n(src, INF), tgt), decide_n_to_n(as_n(src, q1), tgt),
                        ("via_n_infinity_source", "via_n_source"))
    if a == "N" and _is_e(tgt):
        return _combine(trace, decide_n_to_n(src, as_n(tgt, min(p2, q2))), decide_n_to_n(src, as_n(tgt, INF)),
                        ("via_n_min_target", "via_n_infinity_target"))
    if _is_e(src) and b == "N":
        return _combine(trace, decide_n_to_n(as_n(src, INF), tgt), decide_n_to_n(as_n(src, min(p1, q1)), tgt),
                        ("via_n_infinity_source", "via_n_min_source"))
    if a == "B" and _is_e(tgt):
        return _combine(trace, decide_b_to_b(src, as_b(tgt, min(p2, q2))), decide_b_to_b(src, as_b(tgt, max(p2, q2))),
                        ("via_b_min_target", "via_b_max_target"))
    if _is_e(src) and b == "B":
        return _combine(trace, decide_b_to_b(as_b(src, max(p1, q1)), tgt), decide_b_to_b(as_b(src, min(p1, q1)), tgt),
                        ("via_b_max_source", "via_b_min_source"))
    raise ValueError(f"unsupported scale pair {a} -> {b}")


__all__ = [
    "SCHEMA", "Decision", "SpaceSpec", "TraceEntry", "EmbeddingVerdict", "DerivedQuantities", "NBRelation",
    "NBResult", "derived", "alpha_exact", "alpha_law", "decide", "decide_n_to_n", "decide_e_to_e",
    "decide_b_to_b", "decide_n_vs_b", "decide_n_e_fine", "decide_into_continuous", "decide_morrey_inclusion",
    "classical_oracle_at2", "decide_cross_classical",
]
