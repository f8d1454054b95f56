"""Morrey-type quasi-norms of finitely supported dyadic coefficient sequences.

Four sequence quasi-norms are implemented, all with the usual modification for
q = oo.  Writing w_{j,m} = 2^{js}|λ_{j,m}| and χ_{j,m} for the indicator of
Q_{j,m}:

* b: sup_P φ(ℓ(P)) |P|^{-1/p} (Σ_{j} [2^{-jd} Σ_{Q_{j,m} ⊂ P} w^p]^{q/p})^{1/q}
* f: sup_P φ(ℓ(P)) |P|^{-1/p} (∫_P [Σ_{Q_{j,m} ⊂ P} w^q χ_{j,m}]^{p/q})^{1/p}
* n: (Σ_j ‖Σ_m w_{j,m} χ_{j,m} | M_{φ,p}‖^q)^{1/q}
* e: ‖(Σ_{j,m} w^q χ_{j,m})^{1/q} | M_{φ,p}‖

where ‖f | M_{φ,p}‖ = sup_P φ(ℓ(P)) (|P|^{-1} ∫_P |f|^p)^{1/p}.  The condition
j >= max(j_P, 0) in b and f is automatic for cells contained in P.

The supremum over P runs over the ancestor tree of the support (see
:mod:`morrey_embed.dyadic` for why that is enough).  Integrals are exact:
every integrand is constant on the "free" part of each tree node, i.e. the
node minus its children that carry support.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .dyadic import CubeTree, DyadicCube, PreconditionError, cells_by_level
from .weights import INF, GeometricMean, WeightFunction, check_gp, check_intc, parse_number

SCALES = ("b", "f", "n", "e")
# exponents of 2 beyond which float powers w**q would overflow (2^1023)
_LOG2_SAFE = 900.0


class SizeError(ValueError):
    pass


class CoeffSequence:
    """Finitely supported map (j, m) -> real, j >= 0.  Zero entries are dropped."""

    def __init__(self, d: int, entries=None):
        self.d = int(d)
        if self.d < 1:
            raise ValueError("d must be positive")
        grouped: dict[int, dict] = {}
        for key, v in (entries.items() if isinstance(entries, dict) else (entries or [])):
            j, m = key
            v = float(v)
            if v == 0.0:
                continue
            if not math.isfinite(v):
                raise ValueError("coefficients must be finite")
            m = tuple(int(x) for x in m)
            if len(m) != self.d:
                raise ValueError(f"offset {m} has wrong dimension (d={self.d})")
            if int(j) < 0:
                raise ValueError("levels must be >= 0")
            lvl = grouped.setdefault(int(j), {})
            if m in lvl:
                raise ValueError(f"duplicate entry at level {j}, offset {m}")
            lvl[m] = v
        arrays = {}
        for j, lvl in grouped.items():
            offs = np.array(list(lvl.keys()), dtype=np.int64).reshape(-1, self.d)
            vals = np.array(list(lvl.values()), dtype=float)
            arrays[j] = (offs, vals)
        self._set_levels(arrays)

    def _set_levels(self, arrays):
        self._levels = {}
        for j in sorted(arrays):
            offs, vals = arrays[j]
            offs = np.asarray(offs, dtype=np.int64).reshape(-1, self.d)
            vals = np.asarray(vals, dtype=float).reshape(-1)
            keep = vals != 0
            offs, vals = offs[keep], vals[keep]
            if len(vals) == 0:
                continue
            order = np.lexsort(offs.T[::-1])
            offs, vals = offs[order], vals[order]
            if len(offs) > 1 and np.any(np.all(offs[1:] == offs[:-1], axis=1)):
                raise ValueError(f"duplicate offsets at level {j}")
            self._levels[int(j)] = (offs, vals)

    @classmethod
    def from_arrays(cls, d: int, arrays: dict) -> "CoeffSequence":
        """Build from level -> (offsets (n, d), values (n,))."""
        if any(int(j) < 0 for j in arrays):
            raise ValueError("levels must be >= 0")
        out = cls.__new__(cls)
        out.d = int(d)
        out._set_levels(arrays)
        return out

    # -- views --------------------------------------------------------------
    @property
    def levels(self):
        return list(self._levels)

    def level(self, j: int):
        """(offsets, values) at level j (empty arrays when unpopulated)."""
        if j in self._levels:
            return self._levels[j]
        return np.zeros((0, self.d), dtype=np.int64), np.zeros(0)

    @property
    def J_max(self):
        return max(self._levels) if self._levels else None

    def __len__(self):
        return sum(len(v) for _, v in self._levels.values())

    def __bool__(self):
        return bool(self._levels)

    def items(self):
        """Entries in canonical order as ((j, m), value)."""
        for j, (offs, vals) in self._levels.items():
            for off, v in zip(offs, vals):
                yield (j, tuple(int(x) for x in off)), float(v)

    @property
    def entries(self) -> dict:
        return dict(self.items())

    def support(self):
        return [DyadicCube(j, m) for (j, m), _ in self.items()]

    def bounding_box(self) -> dict:
        return {j: (offs.min(axis=0).tolist(), offs.max(axis=0).tolist()) for j, (offs, _) in self._levels.items()}

    def __eq__(self, other):
        if not isinstance(other, CoeffSequence) or other.d != self.d:
            return NotImplemented
        return self.entries == other.entries

    def __repr__(self):
        return f"CoeffSequence(d={self.d}, n={len(self)}, levels={self.levels})"

    # -- transforms -----------------------------------------------------------
    def scaled(self, c: float) -> "CoeffSequence":
        return CoeffSequence.from_arrays(self.d, {j: (o, v * c) for j, (o, v) in self._levels.items()})

    def restrict(self, max_level: int) -> "CoeffSequence":
        return CoeffSequence.from_arrays(self.d, {j: a for j, a in self._levels.items() if j <= max_level})

    def only_level(self, j: int) -> "CoeffSequence":
        return CoeffSequence.from_arrays(self.d, {j: self._levels[j]} if j in self._levels else {})

    # -- JSON -----------------------------------------------------------------
    def to_json(self) -> dict:
        return {"d": self.d, "entries": [[j, list(m), v] for (j, m), v in self.items()]}

    @classmethod
    def from_json(cls, obj: dict) -> "CoeffSequence":
        if not isinstance(obj, dict):
            raise ValueError("sequence must be a JSON object")
        unknown = set(obj) - {"d", "entries", "schema"}
        if unknown:
            raise ValueError(f"unknown sequence field(s): {sorted(unknown)}")
        if "d" not in obj or "entries" not in obj:
            raise ValueError("sequence needs fields 'd' and 'entries'")
        entries = []
        for e in obj["entries"]:
            if not (isinstance(e, (list, tuple)) and len(e) == 3):
                raise ValueError(f"sequence entry must be [j, [m...], value], got {e!r}")
            j, m, v = e
            entries.append(((int(j), tuple(m)), parse_number(v)))
        return cls(int(obj["d"]), entries)


@dataclass(frozen=True)
class NormRequest:
    scale: str
    s: float
    p: float
    q: float
    phi: WeightFunction

    def __post_init__(self):
        if self.scale not in SCALES:
            raise ValueError(f"scale must be one of {SCALES}")
        if not self.p > 0 or self.p == INF:
            raise ValueError("p must be a positive real")
        if not self.q > 0:
            raise ValueError("q must be positive or inf")
        gp = check_gp(self.phi, self.p)
        if not gp:
            raise PreconditionError(f"weight not in G_p for p={self.p} (witness {gp.witness})")
        if self.scale in ("f", "e") and self.q < INF and not check_intc(self.phi):
            raise PreconditionError("f/e scales with finite q need the polynomial lower growth condition")


@dataclass
class NormResult:
    value: float
    argmax_cube: DyadicCube | None = None
    flags: dict = field(default_factory=dict)
    log2_value: float | None = None

    def to_json(self):
        return {
            "value": self.value if math.isfinite(self.value) else "inf",
            "argmax_cube": None if self.argmax_cube is None else self.argmax_cube.to_json(),
            "flags": dict(self.flags),
        }


class _Best:
    """Running maximum in canonical cube order (first maximum wins)."""

    def __init__(self):
        self.value = 0.0
        self.cube = None

    def update(self, values: np.ndarray, level: int, offsets: np.ndarray):
        if len(values) == 0:
            return
        i = int(np.argmax(values))
        if values[i] > self.value:
            self.value = float(values[i])
            self.cube = DyadicCube(level, tuple(int(x) for x in offsets[i]))


def _prefactor(phi: WeightFunction, nu: int, d: int, p: float) -> float:
    """φ(2^-nu) |P|^{-1/p} for a cube at level nu."""
    return phi.eval(nu) * 2.0 ** (nu * d / p)


class _Prepared:
    """Tree plus per-node weights w = 2^{js}|λ| (possibly rescaled by 2^-shift)."""

    def __init__(self, seq: CoeffSequence, s: float, pow_max: float):
        self.d = seq.d
        self.tree = CubeTree({j: seq.level(j)[0] for j in seq.levels}, seq.d)
        logw = {j: j * s + np.log2(np.abs(seq.level(j)[1])) for j in seq.levels}
        hi = max(float(v.max()) for v in logw.values())
        lo = min(float(v.min()) for v in logw.values())
        self.shift = 0
        if max(abs(hi), abs(lo)) * pow_max > _LOG2_SAFE:
            self.shift = int(round(hi))
        self.w = {}
        for l in self.tree.levels:
            arr = np.zeros(len(self.tree.offsets[l]))
            if l in logw:
                arr[self.tree.cell_pos[l]] = np.exp2(logw[l] - self.shift)
            self.w[l] = arr
        self.cell_levels = list(seq.levels)

    def free_volume(self, l: int) -> np.ndarray:
        t = self.tree
        return math.ldexp(1.0, -l * self.d) * (1.0 - t.n_children[l] / 2.0 ** self.d)


def _b_norm(P: _Prepared, phi, p, q, best: _Best):
    t = P.tree
    acc = {l: np.zeros(len(t.offsets[l])) for l in t.levels}
    for j in P.cell_levels:
        v = math.ldexp(1.0, -j * P.d) * P.w[j] ** p
        for nu in range(j, t.top - 1, -1):
            if q == INF:
                np.maximum(acc[nu], v ** (1.0 / p), out=acc[nu])
            else:
                acc[nu] += v ** (q / p)
            if nu > t.top:
                v = np.bincount(t.parent[nu], weights=v, minlength=len(t.offsets[nu - 1]))
    for nu in t.levels:
        inner = acc[nu] if q == INF else acc[nu] ** (1.0 / q)
        best.update(_prefactor(phi, nu, P.d, p) * inner, nu, t.offsets[nu])


def _accumulate_down(P: _Prepared, start: int, q: float):
    """Top-down A(R) = Σ (or max) of w^q over cells containing R with level >= start."""
    t = P.tree
    A = {}
    for l in range(start, t.bottom + 1):
        own = P.w[l] if q == INF else P.w[l] ** q
        if l == start:
            A[l] = own.copy()
        elif q == INF:
            A[l] = np.maximum(A[l - 1][t.parent[l]], own)
        else:
            A[l] = A[l - 1][t.parent[l]] + own
    return A


def _integrals_up(P: _Prepared, A: dict, start: int, p: float, q: float):
    """Bottom-up ∫_R (A)^{p/q} over the free parts of R's subtree, for nodes at levels >= start."""
    t = P.tree
    I = {}
    for l in range(t.bottom, start - 1, -1):
        dens = A[l] ** p if q == INF else A[l] ** (p / q)
        I[l] = P.free_volume(l) * dens
        if l < t.bottom:
            I[l] += np.bincount(t.parent[l + 1], weights=I[l + 1], minlength=len(t.offsets[l]))
    return I


def _e_like(P: _Prepared, phi, p, q, best: _Best, restrict_levels: bool):
    """e (restrict_levels=False) or f (True) suprema."""
    t = P.tree
    start0 = max(t.top, 0)
    A0 = _accumulate_down(P, start0, q)
    I0 = _integrals_up(P, A0, start0, p, q)
    # coarser-than-unit cubes (levels < 0): lift the level-0 integrals
    vals = {}
    if t.top < 0:
        v = I0[0]
        for nu in range(0, t.top - 1, -1):
            if nu < 0:
                vals[nu] = v
            if nu > t.top:
                v = np.bincount(t.parent[nu], weights=v, minlength=len(t.offsets[nu - 1]))
    for nu in range(t.top, t.bottom + 1):
        if nu < 0:
            integral = vals[nu]
        elif not restrict_levels or nu == start0:
            integral = I0[nu]
        else:
            integral = _integrals_up(P, _accumulate_down(P, nu, q), nu, p, q)[nu]
        best.update(_prefactor(phi, nu, P.d, p) * integral ** (1.0 / p), nu, t.offsets[nu])


def _level_morrey(P: _Prepared, j: int, phi, p, best: _Best | None = None) -> float:
    """‖Σ_m w_{j,m} χ_{j,m} | M_{φ,p}‖ using the prepared (possibly rescaled) weights."""
    t = P.tree
    local = _Best()
    v = math.ldexp(1.0, -j * P.d) * P.w[j] ** p
    for nu in range(j, t.top - 1, -1):
        local_vals = _prefactor(phi, nu, P.d, p) * v ** (1.0 / p)
        # ancestors come first in canonical order: compare with >= to prefer them
        i = int(np.argmax(local_vals))
        if local_vals[i] >= local.value and local_vals[i] > 0:
            local.value = float(local_vals[i])
            local.cube = DyadicCube(nu, tuple(int(x) for x in t.offsets[nu][i]))
        if nu > t.top:
            v = np.bincount(t.parent[nu], weights=v, minlength=len(t.offsets[nu - 1]))
    if best is not None and local.value > best.value:
        best.value, best.cube = local.value, local.cube
    return local.value


def _finish(value_scaled: float, shift: int, cube, flags) -> NormResult:
    if shift:
        flags["log_scaled"] = True
        log2v = math.log2(value_scaled) + shift if value_scaled > 0 else -INF
        value = math.ldexp(value_scaled, shift) if log2v < 1023 else INF
        return NormResult(value, cube, flags, log2v)
    return NormResult(value_scaled, cube, flags, math.log2(value_scaled) if value_scaled > 0 else -INF)


def space_norm(seq: CoeffSequence, req: NormRequest) -> NormResult:
    """b, f, n or e quasi-norm of ``seq`` with the parameters of ``req``."""
    if req.phi.d != seq.d:
        raise ValueError(f"weight dimension {req.phi.d} != sequence dimension {seq.d}")
    flags: dict = {}
    if not seq:
        return NormResult(0.0, None, flags, -INF)
    p, q, phi = req.p, req.q, req.phi
    pow_max = max(p, 1.0) if q == INF else max(p, q, 1.0)
    P = _Prepared(seq, req.s, pow_max)
    best = _Best()
    if req.scale == "b":
        _b_norm(P, phi, p, q, best)
        return _finish(best.value, P.shift, best.cube, flags)
    if req.scale in ("e", "f"):
        _e_like(P, phi, p, q, best, restrict_levels=req.scale == "f")
        return _finish(best.value, P.shift, best.cube, flags)
    # n
    terms = []
    level_best = _Best()
    for j in P.cell_levels:
        cand = _Best()
        terms.append(_level_morrey(P, j, phi, p, cand))
        if cand.value > level_best.value:
            level_best = cand
    terms = np.array(terms)
    total = float(terms.max()) if q == INF else float(np.sum(terms ** q) ** (1.0 / q))
    return _finish(total, P.shift, level_best.cube, flags)


def morrey_norm(seq: CoeffSequence, phi: WeightFunction, p: float, level: int | None = None) -> NormResult:
    """‖Σ_m λ_{j,m} χ_{j,m} | M_{φ,p}‖ for one level j of ``seq``."""
    if not check_gp(phi, p):
        raise PreconditionError(f"weight not in G_p for p={p}")
    if level is None:
        if len(seq.levels) > 1:
            raise ValueError("sequence has several levels; pass level=")
        level = seq.levels[0] if seq else 0
    one = seq.only_level(level)
    if not one:
        return NormResult(0.0, None, {}, -INF)
    # s = 0 leaves the coefficients as they are
    P = _Prepared(one, 0.0, max(p, 1.0))
    best = _Best()
    _level_morrey(P, level, phi, p, best)
    return _finish(best.value, P.shift, best.cube, {})


def chain_sum(seq: CoeffSequence) -> float:
    """sup_x Σ_{j,m} |λ_{j,m}| χ_{j,m}(x).

    For the nested constructions this is the value at the common point of the
    chain, i.e. the sequence-level stand-in for the sup-norm of the synthesised
    function.
    """
    if not seq:
        return 0.0
    P = _Prepared(seq, 0.0, 1.0)
    A = _accumulate_down(P, max(P.tree.top, 0), 1.0)
    return max(float(a.max()) for a in A.values()) * 2.0 ** P.shift


def norm_value(seq: CoeffSequence, scale: str, s: float, p: float, q: float, phi: WeightFunction) -> float:
    return space_norm(seq, NormRequest(scale, s, p, q, phi)).value


# ---------------------------------------------------------------------------
# independent oracle

def _exact_bounds(level: int, off):
    side = Fraction(1, 2 ** level) if level >= 0 else Fraction(2 ** (-level))
    return [(Fraction(m) * side, Fraction(m + 1) * side) for m in off]


def _inside(inner, outer) -> bool:
    return all(ol <= il and ih <= oh for (il, ih), (ol, oh) in zip(inner, outer))


def _meets(a, b) -> bool:
    return all(al < bh and bl < ah for (al, ah), (bl, bh) in zip(a, b))


def brute_force_norm(seq: CoeffSequence, req: NormRequest, nu_floor: int = -2) -> float:
    """Exhaustive evaluation over every dyadic P with nu_floor <= level <= J_max meeting the support.

    Integrals are plain sums over the level-J_max grid; no pruning of any kind.
    """
    if nu_floor > 0:
        raise ValueError("nu_floor must be <= 0")
    if not seq:
        return 0.0
    d = seq.d
    J = seq.J_max
    if d > 2 or J > 6:
        raise SizeError("brute force limited to d <= 2 and J_max <= 6")
    s, p, q, phi = req.s, req.p, req.q, req.phi
    cells = [(j, m, abs(v), _exact_bounds(j, m)) for (j, m), v in seq.items()]

    # fine grid over the bounding box of the support
    lo = [min(Fraction(b[i][0]) for *_, b in cells) for i in range(d)]
    hi = [max(Fraction(b[i][1]) for *_, b in cells) for i in range(d)]
    g0 = [int(x * 2 ** J) for x in lo]
    g1 = [int(x * 2 ** J) for x in hi]
    shape = tuple(b - a for a, b in zip(g0, g1))
    vol = 2.0 ** (-J * d)

    def cell_slice(bounds):
        sl = []
        for i, (a, b) in enumerate(bounds):
            ia = max(int(math.floor(a * 2 ** J)), g0[i]) - g0[i]
            ib = min(int(math.ceil(b * 2 ** J)), g1[i]) - g0[i]
            sl.append(slice(max(ia, 0), max(ib, 0)))
        return tuple(sl)

    # every cube meeting the support
    cands = set()
    for nu in range(nu_floor, J + 1):
        for j, m, _, b in cells:
            if nu <= j:
                k = 2 ** (j - nu)
                cands.add((nu, tuple(mi // k for mi in m)))
            else:
                k = 2 ** (nu - j)
                for extra in itertools.product(range(k), repeat=d):
                    cands.add((nu, tuple(mi * k + e for mi, e in zip(m, extra))))
    cands = [(nu, off, _exact_bounds(nu, off)) for nu, off in sorted(cands)]

    def pref(nu):
        return phi.eval(nu) * 2.0 ** (nu * d / p)

    def qsum(arr):
        return float(np.max(arr)) if q == INF else float(np.sum(np.asarray(arr) ** q) ** (1.0 / q))

    if req.scale == "b":
        best = 0.0
        for nu, off, pb in cands:
            per_level = {}
            for j, m, a, b in cells:
                if _inside(b, pb):
                    per_level[j] = per_level.get(j, 0.0) + a ** p
            if not per_level:
                continue
            terms = [2.0 ** (j * (s - d / p)) * S ** (1.0 / p) for j, S in per_level.items()]
            best = max(best, pref(nu) * qsum(terms))
        return best

    if req.scale in ("e", "f"):
        def integrand(filter_bounds):
            G = np.zeros(shape)
            for j, m, a, b in cells:
                if filter_bounds is not None and not _inside(b, filter_bounds):
                    continue
                w = 2.0 ** (j * s) * a
                sl = cell_slice(b)
                if q == INF:
                    G[sl] = np.maximum(G[sl], w)
                else:
                    G[sl] += w ** q
            return G ** p if q == INF else G ** (p / q)

        G_all = integrand(None) if req.scale == "e" else None
        best = 0.0
        for nu, off, pb in cands:
            H = G_all if req.scale == "e" else integrand(pb)
            integral = float(np.sum(H[cell_slice(pb)])) * vol
            best = max(best, pref(nu) * integral ** (1.0 / p))
        return best

    # n: level-wise Morrey norms
    terms = []
    for j in sorted({c[0] for c in cells}):
        F = np.zeros(shape)
        for jj, m, a, b in cells:
            if jj == j:
                F[cell_slice(b)] = a ** p
        mj = 0.0
        for nu, off, pb in cands:
            integral = float(np.sum(F[cell_slice(pb)])) * vol
            mj = max(mj, pref(nu) * integral ** (1.0 / p))
        terms.append(2.0 ** (j * s) * mj)
    return qsum(terms)


# ---------------------------------------------------------------------------

def interp_ratio(seq: CoeffSequence, spec1, spec0, theta: float, q2: float) -> float:
    """f-norm at interpolated parameters over the product of the end-point f-norms.

    ``spec1`` and ``spec0`` are tuples (s, φ, p, q).  The interpolated triple is
    1/p2 = (1-θ)/p1 + θ/p0, s2 = (1-θ)s1 + θ s0, φ2 = φ1^(1-θ) φ0^θ.
    """
    if not 0.0 < theta < 1.0:
        raise ValueError("theta must lie in (0, 1)")
    s1, phi1, p1, q1 = spec1
    s0, phi0, p0, q0 = spec0
    p2 = 1.0 / ((1 - theta) / p1 + theta / p0)
    s2 = (1 - theta) * s1 + theta * s0
    phi2 = GeometricMean(phi1, phi0, theta)
    n1 = norm_value(seq, "f", s1, p1, q1, phi1)
    n0 = norm_value(seq, "f", s0, p0, q0, phi0)
    if n1 == 0.0 or n0 == 0.0:
        raise ValueError("ratio undefined for the zero sequence")
    n2 = norm_value(seq, "f", s2, p2, q2, phi2)
    return n2 / (n1 ** (1 - theta) * n0 ** theta)


__all__ = [
    "CoeffSequence", "NormRequest", "NormResult", "SizeError", "SCALES",
    "space_norm", "morrey_norm", "norm_value", "chain_sum", "brute_force_norm", "interp_ratio",
]
