"""Extremal coefficient sequences from the non-embedding arguments.

Every generator is deterministic and has the prefix property: the output for
depth N is the output for depth N+1 restricted to the first N stages.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .seqnorm import CoeffSequence
from .weights import INF, End, Limit, WeightFunction, limit_behavior, parse_number, weight_from_json

K_SEARCH_CAP = 1000
MAX_ENTRIES = 4_000_000


class WitnessInapplicable(ValueError):
    pass


def _cube_cells(level: int, corner, d: int) -> np.ndarray:
    """Offsets of all level-``level`` cells inside the unit cube Q_{0,corner}."""
    n = 1 << level
    grids = np.meshgrid(*[np.arange(n, dtype=np.int64)] * d, indexing="ij")
    offs = np.stack([g.reshape(-1) for g in grids], axis=1)
    return offs + np.asarray(corner, dtype=np.int64) * n


def _guard(total: int):
    if total > MAX_ENTRIES:
        raise ValueError(f"witness would have {total} entries (limit {MAX_ENTRIES})")


def blowup_scales(phi: WeightFunction, p: float, N: int) -> list[int]:
    """k_0 = 1 and the least k_{ν+1} > k_ν with φ(2^-k)2^{kd/p} > 2 φ(2^-k_ν)2^{k_ν d/p}."""
    d = phi.d
    # compare in log2 to stay finite at deep levels
    val = lambda k: math.log2(phi.eval(k)) + k * d / p  # noqa: E731
    ks = [1]
    while len(ks) < N:
        k0 = ks[-1]
        target = val(k0) + 1.0
        k = k0 + 1
        while val(k) <= target:
            k += 1
            if k > K_SEARCH_CAP:
                raise WitnessInapplicable("blow-up too slow: scale search exceeded its cap")
        ks.append(k)
    return ks


def local_blowup(phi: WeightFunction, s: float, p: float, q: float, N: int) -> CoeffSequence:
    """One cell R_j = [2^-j, 2^{1-j})^d per selected scale j = k_ν, value 2^{-js}/φ(2^-j)."""
    if limit_behavior(phi, p, End.ZERO) != Limit.INFINITE:
        raise WitnessInapplicable("needs φ(t) t^{-d/p} -> oo as t -> 0")
    d = phi.d
    arrays = {}
    for k in blowup_scales(phi, p, N) if N > 0 else []:
        arrays[k] = (np.ones((1, d), dtype=np.int64), np.array([2.0 ** (-k * s) / phi.eval(k)]))
    return CoeffSequence.from_arrays(d, arrays)


def decay_scales(phi: WeightFunction, p: float, r: float, N: int) -> list[int]:
    """k_0 = 0 and the least k_ℓ > k_{ℓ-1} with φ(2^k) 2^{-kd/p} < (ℓ+1)^{-1/r}, ℓ = 1..N.

    A cube holding P_ℓ also holds P_0..P_{ℓ-1}, i.e. ℓ+1 levels, hence ℓ+1 rather than ℓ.
    """
    d = phi.d
    ks = [0]
    for ell in range(1, N + 1):
        bound = 0.0 if r == INF else -math.log2(ell + 1) / r
        k = ks[-1] + 1
        while math.log2(phi.eval(-k)) - k * d / p >= bound:
            k += 1
            if k > K_SEARCH_CAP:
                raise WitnessInapplicable("decay too slow: scale search exceeded its cap")
        ks.append(k)
    return ks


def global_decay(phi: WeightFunction, s: float, p: float, N: int, q: float = INF,
                 exponent_source: str = "q") -> CoeffSequence:
    """2^{-js} on every level-j cell of P_j = Q_{0,(2^{k_j},0,...)} (P_0 = Q_{0,0}), j <= N."""
    if limit_behavior(phi, p, End.INFINITY) != Limit.ZERO:
        raise WitnessInapplicable("needs φ(t) t^{-d/p} -> 0 as t -> oo")
    if exponent_source not in ("q", "p"):
        raise ValueError("exponent_source must be 'q' or 'p'")
    d = phi.d
    _guard(sum(1 << (j * d) for j in range(N + 1)))
    r = q if exponent_source == "q" else p
    ks = decay_scales(phi, p, r, N)
    arrays = {}
    for j in range(N + 1):
        corner = [0] * d
        corner[0] = 0 if j == 0 else 1 << ks[j]
        offs = _cube_cells(j, corner, d)
        arrays[j] = (offs, np.full(len(offs), 2.0 ** (-j * s)))
    return CoeffSequence.from_arrays(d, arrays)


def single_level(k: int, s1: float, d: int = 1) -> CoeffSequence:
    """2^{-k s1} on every level-k cell of Q_{0,0}."""
    if k < 0:
        raise ValueError("k must be >= 0")
    _guard(1 << (k * d))
    offs = _cube_cells(k, [0] * d, d)
    return CoeffSequence.from_arrays(d, {k: (offs, np.full(len(offs), 2.0 ** (-k * s1)))})


def single_coeff(j: int, d: int = 1, value: float = 1.0) -> CoeffSequence:
    """λ_{j,0} = value."""
    if j < 0:
        raise ValueError("j must be >= 0")
    return CoeffSequence.from_arrays(d, {j: (np.zeros((1, d), dtype=np.int64), np.array([float(value)]))})


def fine_index(s: float, q1: float, q2: float, N: int, d: int = 1) -> CoeffSequence:
    """2^{-js}(j+1)^{-1/q2} on every level-j cell of Q_{0,0}, j <= N."""
    if not q2 < q1:
        raise WitnessInapplicable("fine-index witness needs q2 < q1")
    _guard(sum(1 << (j * d) for j in range(N + 1)))
    arrays = {}
    for j in range(N + 1):
        offs = _cube_cells(j, [0] * d, d)
        arrays[j] = (offs, np.full(len(offs), 2.0 ** (-j * s) * (j + 1) ** (-1.0 / q2)))
    return CoeffSequence.from_arrays(d, arrays)


def nested_dual(gamma, s: float, phi: WeightFunction) -> CoeffSequence:
    """γ_j 2^{-js} φ(2^-j)^{-1} on the leftmost nested chain Q_{j,0}."""
    d = phi.d
    arrays = {}
    for j, g in enumerate(gamma):
        if g != 0:
            arrays[j] = (np.zeros((1, d), dtype=np.int64), np.array([g * 2.0 ** (-j * s) / phi.eval(j)]))
    return CoeffSequence.from_arrays(d, arrays)


def dual_gamma(s: float, phi: WeightFunction, r: float, N: int) -> list[float]:
    """Unnormalised extremal γ for the ℓ_r/ℓ_{r'} pairing with a_j = 2^{-js}/φ(2^-j).

    γ_j = a_j^{r'-1} for 1 < r < oo, ones otherwise.
    """
    if r <= 1 or r == INF:
        return [1.0] * N
    rr = r / (r - 1)
    return [(2.0 ** (-j * s) / phi.eval(j)) ** (rr - 1) for j in range(N)]


def nested_atoms(s: float, phi: WeightFunction, N: int) -> CoeffSequence:
    """λ_{j,0} = 1 for j < N (the smoothness s only enters the norm, not the coefficients)."""
    d = phi.d
    arrays = {j: (np.zeros((1, d), dtype=np.int64), np.array([1.0])) for j in range(N)}
    return CoeffSequence.from_arrays(d, arrays)


# ---------------------------------------------------------------------------

# kind -> (required params, optional params)
PARAMS = {
    "local_blowup": ({"phi", "s", "p"}, {"q"}),
    "global_decay": ({"phi", "s", "p"}, {"q", "exponent_source"}),
    "single_level": ({"s1"}, {"d"}),
    "single_coeff": (set(), {"d"}),
    "fine_index": ({"s", "q1", "q2"}, {"d"}),
    "nested_dual": ({"phi", "s", "r"}, set()),
    "nested_atoms": ({"phi", "s"}, set()),
}
KINDS = tuple(PARAMS)


@dataclass(frozen=True)
class WitnessFamily:
    """A witness kind plus its generator parameters; ``generate(N)`` builds depth N."""

    kind: str
    params: dict = field(default_factory=dict, hash=False, compare=True)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown witness kind {self.kind!r}")
        required, optional = PARAMS[self.kind]
        missing = required - set(self.params)
        extra = set(self.params) - required - optional
        if extra:
            raise ValueError(f"unknown param(s) for witness {self.kind}: {sorted(extra)}")
        if missing:
            raise ValueError(f"witness {self.kind} missing param(s): {sorted(missing)}")

    @property
    def id(self) -> str:
        """Short human-readable identifier."""
        shown = []
        for key in sorted(self.params):
            v = self.params[key]
            if isinstance(v, WeightFunction):
                v = v.family
            elif isinstance(v, (int, float)) and not isinstance(v, bool):
                v = "inf" if v == INF else f"{v:g}"
            shown.append(f"{key}={v}")
        return f"{self.kind}({', '.join(shown)})"

    def generate(self, N: int) -> CoeffSequence:
        k, P = self.kind, self.params
        if k == "local_blowup":
            return local_blowup(P["phi"], P["s"], P["p"], P.get("q", INF), N)
        if k == "global_decay":
            return global_decay(P["phi"], P["s"], P["p"], N, P.get("q", INF), P.get("exponent_source", "q"))
        if k == "single_level":
            return single_level(N, P["s1"], P.get("d", 1))
        if k == "single_coeff":
            return single_coeff(N, P.get("d", 1))
        if k == "fine_index":
            return fine_index(P["s"], P["q1"], P["q2"], N, P.get("d", 1))
        if k == "nested_dual":
            gamma = dual_gamma(P["s"], P["phi"], P["r"], N)
            return nested_dual(gamma, P["s"], P["phi"])
        return nested_atoms(P["s"], P["phi"], N)

    def to_json(self) -> dict:
        out = {}
        for key, v in self.params.items():
            if hasattr(v, "to_json"):
                v = v.to_json()
            elif isinstance(v, float) and v == INF:
                v = "inf"
            out[key] = v
        return {"kind": self.kind, "params": out}

    @classmethod
    def from_json(cls, obj: dict) -> "WitnessFamily":
        if not isinstance(obj, dict):
            raise ValueError("witness family must be a JSON object")
        unknown = set(obj) - {"kind", "params", "schema"}
        if unknown:
            raise ValueError(f"unknown witness field(s): {sorted(unknown)}")
        params = {}
        for key, v in dict(obj.get("params", {})).items():
            if key == "phi":
                v = weight_from_json(v)
            elif key == "exponent_source":
                v = str(v)
            elif key == "d":
                v = int(v)
            else:
                v = parse_number(v)
            params[key] = v
        return cls(obj.get("kind"), params)

    def closed_form(self, N: int, src=None, tgt=None) -> float | None:
        """Exact target-side norm at depth N when the construction pins it down.

        ``tgt`` is a space spec (anything with scale, s, q, phi) or the string "C"
        for the sup-norm proxy.  None when no closed form is known.
        """
        k, P = self.kind, self.params
        if tgt == "C":
            if k == "nested_atoms":
                return float(N)
            if k == "nested_dual":
                gam = dual_gamma(P["s"], P["phi"], P["r"], N)
                return float(sum(g * 2.0 ** (-j * P["s"]) / P["phi"].eval(j) for j, g in enumerate(gam)))
            return None
        if tgt is None:
            return None
        if k == "local_blowup" and tgt.scale == "N" and tgt.q < INF:
            return N ** (1.0 / tgt.q)
        if k == "global_decay" and tgt.scale == "N" and tgt.q < INF:
            return (N + 1) ** (1.0 / tgt.q)
        if k == "single_level":
            # one populated level filling Q_{0,0}: the sup sits at P = Q_{0,0}
            return 2.0 ** (N * (tgt.s - P["s1"]))
        if k == "single_coeff":
            return 2.0 ** (N * tgt.s) * tgt.phi.eval(N)
        if k == "fine_index" and tgt.s == P["s"]:
            if tgt.q == INF:
                return 1.0
            return sum((j + 1) ** (-tgt.q / P["q2"]) for j in range(N + 1)) ** (1.0 / tgt.q)
        return None


__all__ = [
    "WitnessFamily", "WitnessInapplicable", "KINDS", "PARAMS", "local_blowup", "global_decay", "single_level",
    "single_coeff", "fine_index", "nested_dual", "nested_atoms", "dual_gamma", "blowup_scales",
    "decay_scales",
]
