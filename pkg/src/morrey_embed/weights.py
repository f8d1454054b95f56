"""Weight functions φ and their class/asymptotic predicates.

Every weight is normalised so that φ(1) = 1.  Dyadic evaluation uses the
level convention ``phi.eval(nu) == φ(2**-nu)``, so positive levels are small
scales and negative levels are large ones.

Asymptotics are handled by a small power-log calculus: a quantity that behaves
like ``x**E * log(x)**A`` as ``x -> oo`` is a :class:`Growth`.  At the zero end
the variable is ``x = 1/t`` (so along dyadic levels ``x = 2**j``), at the
infinity end it is ``x = t``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize_scalar

INF = math.inf
# exponent comparisons are exact up to this slack (inputs are floats like d/u)
LEX_TOL = 1e-12
SAMPLE_NU = (-40, 40)
_SAMPLES_PER_OCTAVE = 4


class InconclusiveError(ValueError):
    """Raised when an asymptotic question cannot be answered (no profile)."""


class WeightRangeError(ValueError):
    """Tabulated weight queried outside its table."""


class ConsistencyError(RuntimeError):
    """Analytic class decision disagrees with the sampled cross-check."""


class End(str, Enum):
    ZERO = "zero"
    INFINITY = "infinity"


class Limit(str, Enum):
    ZERO = "Zero"
    POSITIVE_FINITE = "PositiveFinite"
    INFINITE = "Infinite"


def _sign(x: float) -> int:
    if x > LEX_TOL:
        return 1
    if x < -LEX_TOL:
        return -1
    return 0


@dataclass(frozen=True)
class Growth:
    """``x**E (log x)**A`` as ``x -> oo``."""

    E: float
    A: float = 0.0

    def __mul__(self, other: "Growth") -> "Growth":
        return Growth(self.E + other.E, self.A + other.A)

    def __pow__(self, rho: float) -> "Growth":
        return Growth(self.E * rho, self.A * rho)

    def inv(self) -> "Growth":
        return Growth(-self.E, -self.A)

    def shift(self, dE: float) -> "Growth":
        return Growth(self.E + dE, self.A)

    def order(self) -> int:
        """-1 when tending to 0, 0 when bounded away from 0 and oo, +1 when tending to oo."""
        s = _sign(self.E)
        return s if s else _sign(self.A)

    def limit(self) -> Limit:
        return {-1: Limit.ZERO, 0: Limit.POSITIVE_FINITE, 1: Limit.INFINITE}[self.order()]

    def bounded(self) -> bool:
        return self.order() <= 0

    def in_ell(self, r: float) -> bool:
        """Membership of the sequence ``2**(jE) (j+1)**A`` in ``ell_r``."""
        s = _sign(self.E)
        if s < 0:
            return True
        if s > 0:
            return False
        if r == INF:
            return _sign(self.A) <= 0
        return _sign(self.A * r + 1.0) < 0

    def as_tuple(self):
        return (self.E, self.A)


@dataclass(frozen=True)
class AsymptoticProfile:
    """φ(t) ≍ t**e0 log(e+1/t)**a0 near 0 and t**einf log(e+t)**ainf near oo."""

    e0: float
    a0: float
    einf: float
    ainf: float

    def at(self, end: End) -> Growth:
        if end == End.ZERO:
            return Growth(-self.e0, self.a0)
        return Growth(self.einf, self.ainf)

    def to_json(self) -> dict:
        return {"e0": self.e0, "a0": self.a0, "einf": self.einf, "ainf": self.ainf}


@dataclass(frozen=True)
class GpMembership:
    member: bool
    witness: tuple | None = None
    reason: str = ""

    def __bool__(self):
        return self.member


@dataclass(frozen=True)
class IntcResult:
    holds: bool
    eps: float | None = None
    C: float | None = None
    witness: tuple | None = None

    def __bool__(self):
        return self.holds


class WeightFunction:
    """Base class.  Subclasses implement ``_raw_level`` and optionally ``_raw``."""

    family = "abstract"
    d: int
    factor: float

    # -- evaluation -------------------------------------------------------
    def _raw_level(self, nu: int) -> float:
        return self._raw(math.ldexp(1.0, -nu))

    def _raw(self, t):
        raise NotImplementedError(f"{self.family} weight has no continuous evaluation")

    @property
    def continuous(self) -> bool:
        return True

    def eval(self, nu: int) -> float:
        """Normalised φ(2^-nu)."""
        nu = int(nu)
        return self._raw_level(nu) / self._raw_level(0)

    def __call__(self, t):
        """Normalised φ(t) for closed-form families; ``t`` may be an array."""
        return self._raw(t) / self._raw_level(0)

    def level_values(self, nus) -> np.ndarray:
        return np.array([self.eval(n) for n in nus], dtype=float)

    # -- asymptotics ------------------------------------------------------
    def profile(self) -> AsymptoticProfile:
        raise NotImplementedError

    def growth(self, end: End) -> Growth:
        return self.profile().at(End(end))

    # -- serialisation ----------------------------------------------------
    def params(self) -> dict:
        raise NotImplementedError

    def to_json(self) -> dict:
        params = {k: ("inf" if v == INF else "-inf" if v == -INF else v) if isinstance(v, float) else v
                  for k, v in self.params().items()}
        if self.factor != 1.0:
            params["factor"] = self.factor
        return {"family": self.family, "params": params, "d": self.d}


def _check_d(d):
    if int(d) != d or d < 1:
        raise ValueError(f"dimension d must be a positive integer, got {d!r}")


def _power_exp(u: float, d: int) -> float:
    return 0.0 if u == INF else d / u


@dataclass(frozen=True)
class Power(WeightFunction):
    """φ(t) = t^(d/u); u = oo gives the constant weight, negative u a decreasing one."""

    u: float
    d: int = 1
    factor: float = 1.0
    family = "power"

    def __post_init__(self):
        _check_d(self.d)
        if self.u == 0 or math.isnan(self.u) or self.u == -INF:
            raise ValueError("Power needs u in R\\{0} or u = inf")

    @property
    def exponent(self) -> float:
        return _power_exp(self.u, self.d)

    def _raw_level(self, nu):
        return self.factor * 2.0 ** (-nu * self.exponent)

    def _raw(self, t):
        return self.factor * np.power(t, self.exponent)

    def profile(self):
        e = self.exponent
        return AsymptoticProfile(e, 0.0, e, 0.0)

    def params(self):
        return {"u": self.u}


@dataclass(frozen=True)
class PiecewisePower(WeightFunction):
    """t^(d/u) for t <= 1 and t^(d/v) for t > 1."""

    u: float
    v: float
    d: int = 1
    factor: float = 1.0
    family = "piecewise"

    def __post_init__(self):
        _check_d(self.d)
        if not (self.u > 0 and self.v > 0):
            raise ValueError("PiecewisePower needs u, v in (0, inf]")

    def _raw_level(self, nu):
        e = _power_exp(self.u, self.d) if nu >= 0 else _power_exp(self.v, self.d)
        return self.factor * 2.0 ** (-nu * e)

    def _raw(self, t):
        t = np.asarray(t, dtype=float)
        lo = np.power(t, _power_exp(self.u, self.d))
        hi = np.power(t, _power_exp(self.v, self.d))
        return self.factor * np.where(t <= 1.0, lo, hi)

    def profile(self):
        return AsymptoticProfile(_power_exp(self.u, self.d), 0.0, _power_exp(self.v, self.d), 0.0)

    def params(self):
        return {"u": self.u, "v": self.v}


@dataclass(frozen=True)
class PowerLog(WeightFunction):
    """t^(d/p0) (log(L+t))^a with a <= 0 and L >= e."""

    p0: float
    a: float
    L: float = math.e
    d: int = 1
    factor: float = 1.0
    family = "powerlog"

    def __post_init__(self):
        _check_d(self.d)
        if not self.p0 > 0:
            raise ValueError("PowerLog needs p0 > 0")
        if self.a > 0:
            raise ValueError("PowerLog needs a <= 0")
        if self.L < math.e:
            raise ValueError("PowerLog needs L >= e")

    def _raw_level(self, nu):
        return self.factor * 2.0 ** (-nu * self.d / self.p0) * math.log(self.L + math.ldexp(1.0, -nu)) ** self.a

    def _raw(self, t):
        return self.factor * np.power(t, self.d / self.p0) * np.power(np.log(self.L + np.asarray(t, dtype=float)), self.a)

    def profile(self):
        e = self.d / self.p0
        return AsymptoticProfile(e, 0.0, e, self.a)

    def params(self):
        return {"p0": self.p0, "a": self.a, "L": self.L}

    def monotone_slack(self) -> tuple[float, float]:
        """(d/p0 - |a| max_t h(t), argmax t) with h(t) = t / ((L+t) log(L+t)).

        φ is non-decreasing iff the slack is >= 0.
        """
        if self.a == 0:
            return self.d / self.p0, 1.0

        def neg_h(x):
            t = math.exp(x)
            return -t / ((self.L + t) * math.log(self.L + t))

        res = minimize_scalar(neg_h, bounds=(-30.0, 60.0), method="bounded", options={"xatol": 1e-12})
        return self.d / self.p0 + self.a * (-res.fun), math.exp(res.x)


@dataclass(frozen=True)
class LogExample(WeightFunction):
    """log(1+t)/log 2 on (0,1), t on [1, oo)."""

    d: int = 1
    factor: float = 1.0
    family = "logexample"

    def __post_init__(self):
        _check_d(self.d)

    def _raw_level(self, nu):
        if nu <= 0:
            return self.factor * math.ldexp(1.0, -nu)
        return self.factor * math.log1p(math.ldexp(1.0, -nu)) / math.log(2.0)

    def _raw(self, t):
        t = np.asarray(t, dtype=float)
        return self.factor * np.where(t < 1.0, np.log1p(np.minimum(t, 1.0)) / math.log(2.0), t)

    def profile(self):
        return AsymptoticProfile(1.0, 0.0, 1.0, 0.0)

    def params(self):
        return {}


@dataclass(frozen=True)
class Tabulated(WeightFunction):
    """Values of φ(2^-nu) for nu = nu_min..nu_max, plus an optional profile."""

    nu_min: int
    values: tuple
    profile_: AsymptoticProfile | None = None
    d: int = 1
    factor: float = 1.0
    family = "tabulated"

    def __post_init__(self):
        _check_d(self.d)
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if not self.values:
            raise ValueError("Tabulated needs at least one value")
        if any(not (v > 0 and math.isfinite(v)) for v in self.values):
            raise ValueError("Tabulated values must be positive and finite")
        if not self.nu_min <= 0 <= self.nu_max:
            raise ValueError("Tabulated range must contain level 0 (t = 1) for normalisation")

    @property
    def nu_max(self) -> int:
        return self.nu_min + len(self.values) - 1

    @property
    def continuous(self):
        return False

    def _raw_level(self, nu):
        if not self.nu_min <= nu <= self.nu_max:
            raise WeightRangeError(f"level {nu} outside tabulated range [{self.nu_min}, {self.nu_max}]")
        return self.factor * self.values[nu - self.nu_min]

    def profile(self):
        if self.profile_ is None:
            raise InconclusiveError("tabulated weight has no declared asymptotic profile")
        return self.profile_

    def params(self):
        out = {"nu_min": self.nu_min, "nu_max": self.nu_max, "values": list(self.values)}
        if self.profile_ is not None:
            out["profile"] = self.profile_.to_json()
        return out

    @classmethod
    def from_function(cls, fn, nu_min: int, nu_max: int, profile=None, d: int = 1):
        """Tabulate ``fn(t)`` on the dyadic levels nu_min..nu_max."""
        vals = [float(fn(math.ldexp(1.0, -nu))) for nu in range(nu_min, nu_max + 1)]
        return cls(nu_min, tuple(vals), profile, d)


@dataclass(frozen=True)
class GeometricMean(WeightFunction):
    """φ1^(1-θ) φ0^θ, used for interpolated parameter triples."""

    phi1: WeightFunction
    phi0: WeightFunction
    theta: float
    factor: float = 1.0
    family = "geometric"

    def __post_init__(self):
        if self.phi1.d != self.phi0.d:
            raise ValueError("dimension mismatch")
        if not 0.0 <= self.theta <= 1.0:
            raise ValueError("theta must lie in [0, 1]")

    @property
    def d(self):
        return self.phi1.d

    @property
    def continuous(self):
        return self.phi1.continuous and self.phi0.continuous

    def _raw_level(self, nu):
        return self.factor * self.phi1.eval(nu) ** (1 - self.theta) * self.phi0.eval(nu) ** self.theta

    def _raw(self, t):
        return self.factor * np.power(self.phi1(t), 1 - self.theta) * np.power(self.phi0(t), self.theta)

    def profile(self):
        a, b, th = self.phi1.profile(), self.phi0.profile(), self.theta
        mix = lambda x, y: (1 - th) * x + th * y  # noqa: E731
        return AsymptoticProfile(mix(a.e0, b.e0), mix(a.a0, b.a0), mix(a.einf, b.einf), mix(a.ainf, b.ainf))

    def params(self):
        return {"phi1": self.phi1.to_json(), "phi0": self.phi0.to_json(), "theta": self.theta}

    def to_json(self):
        out = super().to_json()
        out.pop("d", None)
        out["d"] = self.d
        return out


# ---------------------------------------------------------------------------
# JSON

_FAMILY_KEYS = {
    "power": ({"u"}, set()),
    "piecewise": ({"u", "v"}, set()),
    "powerlog": ({"p0", "a"}, {"L"}),
    "logexample": (set(), set()),
    "tabulated": ({"nu_min", "values"}, {"nu_max", "profile"}),
    "geometric": ({"phi1", "phi0", "theta"}, set()),
}


def parse_number(x) -> float:
    """Float conversion accepting the string "inf"."""
    if isinstance(x, str):
        if x.strip().lower() in ("inf", "+inf", "infinity", "oo"):
            return INF
        return float(x)
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ValueError(f"expected a number, got {x!r}")
    return float(x)


def weight_from_json(obj: dict) -> WeightFunction:
    if not isinstance(obj, dict):
        raise ValueError("weight must be a JSON object")
    unknown = set(obj) - {"family", "params", "d", "schema"}
    if unknown:
        raise ValueError(f"unknown weight field(s): {sorted(unknown)}")
    fam = obj.get("family")
    if fam not in _FAMILY_KEYS:
        raise ValueError(f"unknown weight family {fam!r}")
    params = dict(obj.get("params", {}))
    factor = parse_number(params.pop("factor", 1.0))
    required, optional = _FAMILY_KEYS[fam]
    missing = required - set(params)
    extra = set(params) - required - optional
    if extra:
        raise ValueError(f"unknown param(s) for weight family {fam!r}: {sorted(extra)}")
    if missing:
        raise ValueError(f"weight family {fam!r} missing param(s): {sorted(missing)}")
    if fam == "geometric":
        return GeometricMean(weight_from_json(params["phi1"]), weight_from_json(params["phi0"]),
                             parse_number(params["theta"]), factor)
    d = obj.get("d", 1)
    if isinstance(d, bool) or not isinstance(d, int):
        raise ValueError("weight field 'd' must be an integer")
    if fam == "power":
        return Power(parse_number(params["u"]), d, factor)
    if fam == "piecewise":
        return PiecewisePower(parse_number(params["u"]), parse_number(params["v"]), d, factor)
    if fam == "powerlog":
        return PowerLog(parse_number(params["p0"]), parse_number(params["a"]),
                        parse_number(params.get("L", math.e)), d, factor)
    if fam == "logexample":
        return LogExample(d, factor)
    prof = params.get("profile")
    if prof is not None:
        bad = set(prof) ^ {"e0", "a0", "einf", "ainf"}
        if bad:
            raise ValueError(f"profile needs exactly e0, a0, einf, ainf (offending: {sorted(bad)})")
        prof = AsymptoticProfile(*(parse_number(prof[k]) for k in ("e0", "a0", "einf", "ainf")))
    nu_min = int(params["nu_min"])
    values = tuple(parse_number(v) for v in params["values"])
    if "nu_max" in params and int(params["nu_max"]) != nu_min + len(values) - 1:
        raise ValueError("tabulated nu_max inconsistent with number of values")
    return Tabulated(nu_min, values, prof, d, factor)


# ---------------------------------------------------------------------------
# class membership

def _sample_grid(phi: WeightFunction):
    """Ordered sample points t and log φ(t) over the levels in SAMPLE_NU."""
    lo, hi = SAMPLE_NU
    if isinstance(phi, Tabulated):
        # the table is the whole object: scan all of it
        lo, hi = phi.nu_min, phi.nu_max
    if phi.continuous:
        k = np.arange(-hi * _SAMPLES_PER_OCTAVE, -lo * _SAMPLES_PER_OCTAVE + 1)
        t = np.exp2(k / _SAMPLES_PER_OCTAVE)
        vals = np.asarray(phi(t), dtype=float)
    else:
        nus = np.arange(hi, lo - 1, -1)
        t = np.exp2(-nus.astype(float))
        vals = phi.level_values(nus)
    return t, vals


def _sampled_violation(phi: WeightFunction, p: float, tol: float = 1e-12):
    """First consecutive sample pair (t, s), t < s, violating the G_p conditions."""
    t, vals = _sample_grid(phi)
    if len(t) < 2:
        return None
    if np.any(~(vals > 0)):
        i = int(np.argmax(~(vals > 0)))
        return (float(t[max(i - 1, 0)]), float(t[max(i, 1)]))
    lv = np.log(vals)
    lt = np.log(t)
    dec = np.diff(lv) < -tol * np.maximum(1.0, np.abs(lv[1:]))
    psi = lv - (phi.d / p) * lt
    inc = np.diff(psi) > tol * np.maximum(1.0, np.abs(psi[1:]))
    bad = np.flatnonzero(dec | inc)
    if bad.size == 0:
        return None
    i = int(bad[0])
    return (float(t[i]), float(t[i + 1]))


def _violates(phi: WeightFunction, p: float, pair) -> bool:
    t, s = pair
    if phi.continuous:
        ft, fs = float(phi(t)), float(phi(s))
    else:
        ft, fs = phi.eval(round(-math.log2(t))), phi.eval(round(-math.log2(s)))
    return ft > fs or t ** (-phi.d / p) * ft < s ** (-phi.d / p) * fs


def _profile_gp_ok(prof: AsymptoticProfile, d: int, p: float) -> bool:
    """Asymptotic form of the two monotonicity requirements at both ends."""
    dp = d / p
    nondecr0 = _sign(prof.e0) > 0 or (_sign(prof.e0) == 0 and _sign(prof.a0) <= 0)
    nonincr0 = _sign(prof.e0 - dp) < 0 or (_sign(prof.e0 - dp) == 0 and _sign(prof.a0) >= 0)
    nondecrinf = _sign(prof.einf) > 0 or (_sign(prof.einf) == 0 and _sign(prof.ainf) >= 0)
    nonincrinf = _sign(prof.einf - dp) < 0 or (_sign(prof.einf - dp) == 0 and _sign(prof.ainf) <= 0)
    return nondecr0 and nonincr0 and nondecrinf and nonincrinf


def _analytic_gp(phi: WeightFunction, p: float):
    """(member, witness, reason) from closed forms, or None when only sampling applies."""
    d = phi.d
    if isinstance(phi, Power):
        if phi.u < 0:
            return False, (1.0, 2.0), "weight is decreasing"
        if phi.u == INF or p <= phi.u * (1 + LEX_TOL):
            return True, None, "p <= u"
        return False, (1.0, 2.0), "p > u: t^(-d/p) phi(t) increases"
    if isinstance(phi, PiecewisePower):
        if p > phi.u * (1 + LEX_TOL):
            return False, (0.25, 0.5), "p > u: local part fails"
        if p > phi.v * (1 + LEX_TOL):
            return False, (2.0, 4.0), "p > v: global part fails"
        return True, None, "p <= min(u, v)"
    if isinstance(phi, PowerLog):
        slack, tstar = phi.monotone_slack()
        if slack < -LEX_TOL:
            r = 2.0 ** 0.125
            return False, (tstar / r, tstar * r), "weight decreases near its log-dominated range"
        if p > phi.p0 * (1 + LEX_TOL):
            return False, (2.0 ** -40, 2.0 ** -39), "p > p0: t^(-d/p) phi(t) increases near 0"
        return True, None, "p <= p0 and d/p0 >= |a| max h"
    if isinstance(phi, LogExample):
        if p <= d * (1 + LEX_TOL):
            return True, None, "p <= d"
        return False, (1.0, 2.0), "p > d: t^(1-d/p) increases for t >= 1"
    if isinstance(phi, Tabulated):
        w = _sampled_violation(phi, p, tol=1e-12)
        if w is not None:
            return False, w, "table violates monotonicity"
        if phi.profile_ is not None and not _profile_gp_ok(phi.profile_, d, p):
            return False, None, "declared profile incompatible with G_p"
        return True, None, "table and profile consistent"
    return None


@lru_cache(maxsize=4096)
def check_gp(phi: WeightFunction, p: float) -> GpMembership:
    """Decide φ ∈ G_p analytically, cross-checked by dyadic sampling."""
    if not p > 0:
        raise ValueError("p must be positive")
    sampled = _sampled_violation(phi, p)
    analytic = _analytic_gp(phi, p)
    if analytic is None:
        # derived weights: sampled decision on the dyadic grid is all we have
        if sampled is not None:
            return GpMembership(False, sampled, "sampled violation")
        try:
            if not _profile_gp_ok(phi.profile(), phi.d, p):
                return GpMembership(False, None, "profile incompatible with G_p")
        except InconclusiveError:
            pass
        return GpMembership(True, None, "sampled")
    member, witness, reason = analytic
    if member and sampled is not None:
        raise ConsistencyError(f"{phi!r}: analytic Member for p={p} but sampled violation at {sampled}")
    if not member:
        if sampled is not None:
            witness = sampled
        elif witness is not None and not _violates(phi, p, witness):
            raise ConsistencyError(f"{phi!r}: analytic NotMember for p={p} but witness {witness} does not violate")
    return GpMembership(member, witness, reason)


def check_intc(phi: WeightFunction) -> IntcResult:
    """Polynomial lower growth: φ(t)/φ(r) >= C^-1 (t/r)^eps for t >= r."""
    d = phi.d
    if isinstance(phi, Power):
        if phi.u == INF or phi.u < 0:
            return IntcResult(False, witness=(2.0 ** 40, 1.0))
        return IntcResult(True, d / phi.u, 1.0)
    if isinstance(phi, PiecewisePower):
        if phi.v == INF:
            return IntcResult(False, witness=(2.0 ** 40, 2.0))
        if phi.u == INF:
            return IntcResult(False, witness=(0.5, 2.0 ** -40))
        return IntcResult(True, min(d / phi.u, d / phi.v), 1.0)
    if isinstance(phi, LogExample):
        return IntcResult(True, 1.0, 1.0 / math.log(2.0))
    if isinstance(phi, GeometricMean):
        a, b = check_intc(phi.phi1), check_intc(phi.phi0)
        if a and b:
            th = phi.theta
            return IntcResult(True, (1 - th) * a.eps + th * b.eps, a.C ** (1 - th) * b.C ** th)
        prof = phi.profile()
        return IntcResult(False, witness=_intc_witness(prof))
    prof = phi.profile()  # Tabulated without profile raises InconclusiveError
    if _sign(prof.e0) <= 0 or _sign(prof.einf) <= 0:
        return IntcResult(False, witness=_intc_witness(prof))
    eps = min(prof.e0, prof.einf) / 2.0
    return IntcResult(True, eps, _intc_constant(phi, eps))


def _intc_witness(prof: AsymptoticProfile):
    if _sign(prof.einf) <= 0:
        return (2.0 ** 40, 2.0)
    return (0.5, 2.0 ** -40)


def _intc_constant(phi: WeightFunction, eps: float) -> float:
    """sup over r <= t of (t/r)^eps φ(r)/φ(t), scanned on a fine grid."""
    if phi.continuous:
        t = np.exp2(np.arange(-60 * 8, 60 * 8 + 1) / 8.0)
        g = np.log(np.asarray(phi(t), dtype=float)) - eps * np.log(t)
    else:
        nus = np.arange(phi.nu_max, phi.nu_min - 1, -1)
        g = np.log(phi.level_values(nus)) + eps * nus * math.log(2.0)
    run = np.maximum.accumulate(g)
    return float(np.exp(np.max(run - g))) * (1 + 1e-9)


def rphi(phi: WeightFunction) -> float:
    """sup{p : φ ∈ G_p^loc}; oo exactly when φ is constant on (0,1)."""
    d = phi.d
    if isinstance(phi, Power):
        if phi.u < 0:
            raise ValueError("decreasing weight is in no local class")
        return phi.u
    if isinstance(phi, PiecewisePower):
        return phi.u
    if isinstance(phi, PowerLog):
        return phi.p0
    if isinstance(phi, LogExample):
        return float(d)
    if isinstance(phi, Tabulated) and phi.profile_ is None:
        # discrete estimate from the table: 2^(nu d/p) φ(2^-nu) non-decreasing in nu >= 0
        vals = [phi.eval(n) for n in range(0, phi.nu_max + 1)]
        steps = [math.log2(a / b) for a, b in zip(vals, vals[1:])]
        worst = max(steps, default=0.0)
        return INF if worst <= LEX_TOL else d / worst
    e0 = phi.profile().e0
    return INF if _sign(e0) <= 0 else d / e0


def limit_behavior(phi: WeightFunction, p: float, end) -> Limit:
    """Limit class of φ(t) t^(-d/p) at the given end (p = oo allowed)."""
    end = End(end)
    dp = 0.0 if p == INF else phi.d / p
    g = phi.growth(end)
    g = g.shift(dp) if end == End.ZERO else g.shift(-dp)
    return g.limit()


class Ordering(str, Enum):
    LESS = "Less"
    EQUAL = "Equal"
    GREATER = "Greater"


def ratio_growth(phi2: WeightFunction, phi1: WeightFunction, rho: float, end) -> Growth:
    """Growth of φ2 / φ1^rho as the given end is approached."""
    end = End(end)
    return phi2.growth(end) * (phi1.growth(end) ** rho).inv()


def lex_compare_growth(phi2: WeightFunction, phi1: WeightFunction, rho: float, end) -> Ordering:
    """Compare φ2 against φ1^rho at an end; the sup of the ratio there is finite iff not GREATER."""
    o = ratio_growth(phi2, phi1, rho, end).order()
    return {-1: Ordering.LESS, 0: Ordering.EQUAL, 1: Ordering.GREATER}[o]


def inf_is_zero(phi: WeightFunction) -> bool:
    """inf_{t>0} φ(t) = 0, i.e. φ(t) -> 0 as t -> 0."""
    return phi.growth(End.ZERO).order() < 0


__all__ = [
    "INF", "End", "Limit", "Ordering", "Growth", "AsymptoticProfile", "GpMembership", "IntcResult",
    "WeightFunction", "Power", "PiecewisePower", "PowerLog", "LogExample", "Tabulated", "GeometricMean",
    "InconclusiveError", "WeightRangeError", "ConsistencyError",
    "check_gp", "check_intc", "rphi", "limit_behavior", "lex_compare_growth", "ratio_growth",
    "inf_is_zero", "weight_from_json", "parse_number",
]
