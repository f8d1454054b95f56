"""Numerical corroboration of verdicts by norm-ratio scans over growing depth.

A scan evaluates target-norm / source-norm for a witness family at each depth,
or the worst ratio over a batch of random sequences of that depth, and
classifies the resulting table:

* Diverging when each of the last two steps grows the ratio by >= GROWTH;
* Bounded when max/min over the last WINDOW ratios is <= FLATNESS;
* Indeterminate otherwise (the scan is first extended, within a budget).
"""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .oracle import SCHEMA, Decision, EmbeddingVerdict, SpaceSpec
from .seqnorm import CoeffSequence, chain_sum, norm_value
from .witnesses import WitnessFamily

GROWTH = 1.1
FLATNESS = 1.05
WINDOW = 3
DEFAULT_DRAWS = 200
CSV_COLUMNS = ("depth", "src_norm", "tgt_norm", "ratio")


class Trend(str, Enum):
    BOUNDED = "Bounded"
    DIVERGING = "Diverging"
    INDETERMINATE = "Indeterminate"


def classify(ratios) -> tuple[Trend, float | None]:
    """Trend of a ratio table plus its estimate (constant, or growth factor per depth step)."""
    r = [x for x in ratios if x is not None and math.isfinite(x) and x > 0]
    if len(r) < WINDOW:
        return Trend.INDETERMINATE, None
    a, b, c = r[-3:]
    if b >= GROWTH * a and c >= GROWTH * b:
        return Trend.DIVERGING, math.sqrt(c / a)
    if max(a, b, c) <= FLATNESS * min(a, b, c):
        return Trend.BOUNDED, max(r)
    return Trend.INDETERMINATE, None


def target_norm(seq: CoeffSequence, tgt) -> float:
    """Norm of ``seq`` in the target; "C" is the sup of Σ|λ|χ (the bounded-function proxy)."""
    if isinstance(tgt, str):
        return chain_sum(seq)
    return norm_value(seq, tgt.seq_scale, tgt.s, tgt.p, tgt.q, tgt.phi)


def source_norm(seq: CoeffSequence, src: SpaceSpec) -> float:
    return norm_value(seq, src.seq_scale, src.s, src.p, src.q, src.phi)


def random_sequence(seed: int, draw: int, depth: int, d: int = 1, decay: float = 2.0) -> CoeffSequence:
    """Random coefficients ±2^{-j u} U, U ~ uniform(0, 1], on about half of the level-j cells in [-1, 1)^d.

    Level j only depends on (seed, draw, j), so depth N is a prefix of depth N + 1.
    """
    arrays = {}
    for j in range(depth + 1):
        rng = np.random.default_rng([seed, draw, j])
        n = 1 << j
        grids = np.meshgrid(*[np.arange(-n, n, dtype=np.int64)] * d, indexing="ij")
        offs = np.stack([g.reshape(-1) for g in grids], axis=1)
        keep = rng.random(len(offs)) < 0.5
        u = 1.0 - rng.random(len(offs))
        sign = rng.choice([-1.0, 1.0], size=len(offs))
        vals = sign * u * 2.0 ** (-j * decay)
        arrays[j] = (offs[keep], vals[keep])
    return CoeffSequence.from_arrays(d, arrays)


@dataclass
class ScanRow:
    depth: int
    src_norm: float
    tgt_norm: float
    ratio: float | None
    expected: float | None = None
    flags: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"depth": self.depth, "src_norm": self.src_norm, "tgt_norm": self.tgt_norm, "ratio": self.ratio,
                "expected_tgt_norm": self.expected, "flags": list(self.flags)}


@dataclass
class VerificationReport:
    family_id: str
    source: dict
    target: object
    rows: list
    trend: Trend
    estimate: float | None
    seed: int | None = None
    n_draws: int | None = None
    flags: list = field(default_factory=list)
    agreement: bool | None = None

    @property
    def depths(self) -> list:
        return [r.depth for r in self.rows]

    @property
    def ratios(self) -> list:
        return [r.ratio for r in self.rows]

    def rate_error(self) -> float | None:
        """Largest relative deviation of the measured target norm from its closed form."""
        errs = [abs(r.tgt_norm / r.expected - 1.0) for r in self.rows if r.expected]
        return max(errs) if errs else None

    def growth_error(self) -> float | None:
        """Relative deviation of the measured last-step ratio growth from the closed-form target growth.

        Meaningful when the source norm stays bounded along the family (local_blowup,
        global_decay, single_level); families whose source norm grows will show a gap here.
        """
        rows = [r for r in self.rows if r.expected and r.ratio]
        if len(rows) < 2:
            return None
        a, b = rows[-2], rows[-1]
        return abs((b.ratio / a.ratio) / (b.expected / a.expected) - 1.0)

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "family": self.family_id,
            "source": self.source,
            "target": self.target,
            "depths": self.depths,
            "rows": [r.to_json() for r in self.rows],
            "trend": self.trend.value,
            "estimate": self.estimate,
            "seed": self.seed,
            "n_draws": self.n_draws,
            "flags": list(self.flags),
            "agreement": self.agreement,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "VerificationReport":
        known = {"schema", "family", "source", "target", "depths", "rows", "trend", "estimate", "seed",
                 "n_draws", "flags", "agreement"}
        unknown = set(obj) - known
        if unknown:
            raise ValueError(f"unknown report field(s): {sorted(unknown)}")
        if obj.get("schema") != SCHEMA:
            raise ValueError(f"unsupported schema {obj.get('schema')!r}")
        rows = [ScanRow(r["depth"], r["src_norm"], r["tgt_norm"], r["ratio"], r.get("expected_tgt_norm"),
                        list(r.get("flags", []))) for r in obj["rows"]]
        return cls(obj["family"], obj["source"], obj["target"], rows, Trend(obj["trend"]), obj.get("estimate"),
                   obj.get("seed"), obj.get("n_draws"), list(obj.get("flags", [])), obj.get("agreement"))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.rows:
            w.writerow([r.depth, repr(r.src_norm), repr(r.tgt_norm), "" if r.ratio is None else repr(r.ratio)])
        return buf.getvalue()


def _row(depth, s, t, expected=None) -> ScanRow:
    if s == 0:
        return ScanRow(depth, s, t, None, expected, ["zero_source_norm"])
    return ScanRow(depth, s, t, t / s, expected)


def _family_row(src, tgt, family: WitnessFamily, depth: int) -> ScanRow:
    seq = family.generate(depth)
    return _row(depth, source_norm(seq, src), target_norm(seq, tgt), family.closed_form(depth, src, tgt))


def _random_row(src, tgt, depth, seed, n_draws, decay) -> ScanRow:
    best = None
    for k in range(n_draws):
        seq = random_sequence(seed, k, depth, src.d, decay)
        s = source_norm(seq, src)
        if s == 0:
            continue
        t = target_norm(seq, tgt)
        if best is None or t / s > best[2]:
            best = (s, t, t / s)
    if best is None:
        return ScanRow(depth, 0.0, 0.0, None, None, ["zero_source_norm"])
    return ScanRow(depth, *best)


def _next_depths(depths, family) -> list:
    """One more depth: doubling for witness families, +1 for random sequences."""
    last = depths[-1]
    return [last * 2 if (family is not None and last > 0) else last + 1]


def ratio_scan(src: SpaceSpec, tgt, family: WitnessFamily | None = None, depths=(2, 4, 8, 16), seed: int = 0,
               n_draws: int = DEFAULT_DRAWS, decay: float | None = None, budget: int = 2,
               max_depth: int | None = None, workers: int = 1) -> VerificationReport:
    """Scan target/source norm ratios over ``depths``.

    With ``family`` the ratio is taken on the witness sequence of each depth;
    without it, on the worst of ``n_draws`` random sequences (seeded by ``seed``).
    An Indeterminate table is extended by up to ``budget`` further depths.
    """
    depths = sorted(set(int(x) for x in depths))
    if not depths or depths[0] < 0:
        raise ValueError("depths must be non-negative integers")
    if family is None:
        if decay is None:
            decay = max(src.s, 0.0 if isinstance(tgt, str) else tgt.s) + 2.0
        max_depth = 8 if max_depth is None else max_depth
        job = lambda n: _random_row(src, tgt, n, seed, n_draws, decay)  # noqa: E731
        fid = f"random(seed={seed}, draws={n_draws}, decay={decay:g})"
    else:
        max_depth = 64 if max_depth is None else max_depth
        job = lambda n: _family_row(src, tgt, family, n)  # noqa: E731
        fid = family.id

    def run(ds):
        if workers > 1:
            with ThreadPoolExecutor(workers) as ex:
                return list(ex.map(job, ds))
        return [job(n) for n in ds]

    rows = run(depths)
    trend, est = classify([r.ratio for r in rows])
    flags = []
    extra = 0
    while trend == Trend.INDETERMINATE and extra < budget:
        nxt = [n for n in _next_depths([r.depth for r in rows], family) if n <= max_depth]
        if not nxt:
            break
        rows += run(nxt)
        extra += 1
        trend, est = classify([r.ratio for r in rows])
    if extra:
        flags.append(f"extended_by_{extra}")
    exp = [r.expected for r in rows if r.expected]
    if len(exp) >= 2 and exp[-1] / exp[-2] < GROWTH and exp[-1] > exp[0]:
        flags.append("rate_below_detection")
    if any("zero_source_norm" in r.flags for r in rows):
        flags.append("zero_source_norm")
    target = tgt if isinstance(tgt, str) else tgt.to_json()
    return VerificationReport(fid, src.to_json(), target, rows, trend, est,
                              seed if family is None else None, n_draws if family is None else None, flags)


@dataclass
class CrosscheckResult:
    consistent: bool
    details: str = ""
    offending: VerificationReport | None = None

    @property
    def status(self) -> str:
        return "Consistent" if self.consistent else "Conflict"

    def to_json(self) -> dict:
        return {"schema": SCHEMA, "status": self.status, "details": self.details,
                "offending": self.offending.family_id if self.offending is not None else None}


def crosscheck(verdict: EmbeddingVerdict, reports) -> CrosscheckResult:
    """Holds must see no divergence; Fails with a witness must see its family diverge."""
    reports = list(reports)
    if verdict.decision == Decision.HOLDS:
        for rep in reports:
            if rep.trend == Trend.DIVERGING:
                return CrosscheckResult(False, "positive verdict but a ratio scan diverges", rep)
        return CrosscheckResult(True, "no scan diverges")
    if verdict.decision == Decision.FAILS and verdict.witness is not None:
        wid = verdict.witness.id
        mine = [r for r in reports if r.family_id == wid]
        if any(r.trend == Trend.DIVERGING for r in mine):
            return CrosscheckResult(True, "witness family diverges")
        return CrosscheckResult(False, "witness family not shown to diverge", mine[0] if mine else None)
    return CrosscheckResult(True, "nothing to contradict")


def verify(verdict: EmbeddingVerdict, src: SpaceSpec, tgt, depths=(2, 4, 8, 16), seed: int = 0,
           n_draws: int = DEFAULT_DRAWS, random_depths=(2, 3, 4, 5, 6)) -> tuple[CrosscheckResult, list]:
    """Run the scans a verdict calls for and cross-check: witness family on Fails, random batch otherwise."""
    reports = []
    if verdict.witness is not None:
        reports.append(ratio_scan(src, tgt, verdict.witness, depths))
    if verdict.decision != Decision.FAILS or verdict.witness is None:
        reports.append(ratio_scan(src, tgt, None, random_depths, seed=seed, n_draws=n_draws))
    result = crosscheck(verdict, reports)
    for rep in reports:
        rep.agreement = crosscheck(verdict, [rep]).consistent if verdict.decision != Decision.FAILS \
            else (rep.trend == Trend.DIVERGING or rep.family_id != getattr(verdict.witness, "id", None))
    return result, reports


__all__ = [
    "Trend", "ScanRow", "VerificationReport", "CrosscheckResult", "classify", "ratio_scan", "crosscheck",
    "verify", "random_sequence", "target_norm", "source_norm", "GROWTH", "FLATNESS", "WINDOW",
]
