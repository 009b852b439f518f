"""Exponent calculus for the dispersive and integrated-group estimates.

Everything here is exact rational arithmetic on (m, n, k, p) followed by a
final conversion to float, so the strict-inequality hypotheses of the
estimates can be decided reliably.  Interval endpoints carry open/closed flags
as data rather than conventions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction


class ExponentError(ValueError):
    """Out-of-range arguments or inadmissible (p, q) pairs."""


def _frac(x):
    """Exact Fraction from an int/float/Fraction (floats are exact in binary)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        if math.isinf(x) or math.isnan(x):
            raise ExponentError(f"cannot convert {x} to a rational")
        return Fraction(x)
    raise ExponentError(f"unsupported numeric type {type(x)!r}")


def conjugate(p):
    """Holder conjugate p' = p/(p-1), with p=1 -> inf and p=inf -> 1."""
    if p == math.inf:
        return 1.0
    p = _frac(p)
    if p < 1:
        raise ExponentError(f"p must be >= 1, got {float(p)}")
    if p == 1:
        return math.inf
    return p / (p - 1)


def decay_exponent(m, n, k):
    """Kernel decay exponent h(m,n,k) = (m-2)/(2(m-1)) + (m-k)(n-1)/(k(m-1))."""
    _validate_mnk(m, n, k)
    return Fraction(m - 2, 2 * (m - 1)) + Fraction((m - k) * (n - 1), k * (m - 1))


def _validate_mnk(m, n, k):
    if m % 2 != 0 or m < 4:
        raise ExponentError(f"degree m must be even and >= 4, got {m}")
    if n < 2:
        raise ExponentError(f"dimension n must be >= 2, got {n}")
    if not 2 <= k <= m:
        raise ExponentError(f"type order k must satisfy 2 <= k <= m, got {k}")


def q_of(tau, p):
    """Solve 1/q = 1/(tau*p) + 1/(tau'*p') for q; strictly increasing in tau."""
    tau = _frac(tau)
    if tau <= 2:
        raise ExponentError(f"tau must exceed 2, got {float(tau)}")
    p = _frac(p)
    if not 1 <= p <= 2:
        raise ExponentError(f"p must lie in [1, 2], got {float(p)}")
    inv_p_conj = 1 - 1 / p
    inv_tau_conj = 1 - 1 / tau
    inv_q = 1 / (tau * p) + inv_tau_conj * inv_p_conj
    return 1 / inv_q


@dataclass(frozen=True)
class Interval:
    """Interval of admissible exponents with explicit endpoint flags."""

    lo: float
    hi: float
    lo_open: bool
    hi_open: bool
    kind: str = ""
    empty: bool = False
    note: str = ""

    def contains(self, x):
        if self.empty:
            return False
        if x == math.inf:
            ok_hi = self.hi == math.inf and not self.hi_open
            return ok_hi and (self.lo < math.inf or not self.lo_open)
        if x < self.lo or (self.lo_open and x == self.lo):
            return False
        if x > self.hi or (self.hi_open and x == self.hi):
            return False
        return True

    def __str__(self):
        if self.empty:
            return "{}"
        if self.lo == self.hi:
            return "{" + _fmt(self.lo) + "}"
        lo_b = "(" if self.lo_open else "["
        hi_b = ")" if self.hi_open else "]"
        return f"{lo_b}{_fmt(self.lo)}, {_fmt(self.hi)}{hi_b}"

    def to_dict(self):
        return {
            "kind": self.kind,
            "text": str(self),
            "lo": _json_num(self.lo) if not self.empty else None,
            "hi": _json_num(self.hi) if not self.empty else None,
            "lo_open": self.lo_open,
            "hi_open": self.hi_open,
            "empty": self.empty,
            "note": self.note,
        }


def _fmt(x):
    if x == math.inf:
        return "inf"
    return repr(float(x))


def _json_num(x):
    return "inf" if x == math.inf else float(x)


def _singleton(x, kind, note=""):
    return Interval(lo=float(x) if x != math.inf else math.inf, hi=float(x) if x != math.inf else math.inf,
                    lo_open=False, hi_open=False, kind=kind, note=note)


@dataclass(frozen=True)
class ExponentTable:
    """All derived exponents for a symbol class (m, n, k) at Lebesgue index p."""

    m: int
    n: int
    k: int
    p: float
    h: float
    tau: float
    tau_conj: float
    p_conj: float
    q_p: float
    n_p: float
    beta_min_free: float
    beta_min_potential: float
    classical_note: str = ""

    def to_dict(self):
        d = {
            "m": self.m, "n": self.n, "k": self.k, "p": self.p,
            "h": self.h, "tau": self.tau, "tau_conj": self.tau_conj,
            "p_conj": _json_num(self.p_conj), "q_p": _json_num(self.q_p),
            "n_p": self.n_p,
            "beta_min_free": self.beta_min_free,
            "beta_min_potential": self.beta_min_potential,
            "I_p": str(admissible_q(self, self.p)),
            "I_prime_p": str(admissible_s(self, self.p)),
        }
        if self.classical_note:
            d["note"] = self.classical_note
        return d


def compute_table(m, n, k, p):
    """Populate the full exponent table; raises on out-of-range arguments."""
    _validate_mnk(m, n, k)
    pf = _frac(p)
    if not 1 <= pf <= 2:
        raise ExponentError(f"p must lie in [1, 2], got {float(pf)}")
    h = decay_exponent(m, n, k)
    tau = Fraction(n) / h
    tau_conj = tau / (tau - 1)
    q_p = Fraction(2) if pf == 2 else q_of(tau, pf)
    n_p = Fraction(n) * abs(Fraction(1, 2) - 1 / pf)
    return ExponentTable(
        m=m, n=n, k=k, p=float(pf),
        h=float(h), tau=float(tau), tau_conj=float(tau_conj),
        p_conj=conjugate(pf) if pf > 1 else math.inf,
        q_p=float(q_p),
        n_p=float(n_p),
        beta_min_free=float(n_p),
        beta_min_potential=float(n_p + 1),
    )


def admissible_q(table, p=None):
    """Interval I_p of target exponents q for the propagator estimate.

    Branches: (q(p), inf] below tau', (q(p), p(2-tau')/(p-tau')) on [tau', 2),
    and the singleton {2} at p = 2.  At the branch point p = tau' the second
    branch's upper endpoint is evaluated as +inf (its limit), matching the
    first branch; this boundary reading is flagged in the note.
    """
    p = table.p if p is None else p
    pf = _frac(p)
    if not 1 <= pf <= 2:
        raise ExponentError(f"p must lie in [1, 2], got {float(pf)}")
    if pf == 2:
        return _singleton(2.0, "I_p")
    tau = _frac(table.tau)
    tau_c = tau / (tau - 1)
    q_p = q_of(tau, pf)
    if pf < tau_c:
        return Interval(lo=float(q_p), hi=math.inf, lo_open=True, hi_open=False, kind="I_p")
    if pf == tau_c:
        return Interval(lo=float(q_p), hi=math.inf, lo_open=True, hi_open=True, kind="I_p",
                        note="boundary p = tau': upper endpoint taken as the limit +inf")
    hi = pf * (2 - tau_c) / (pf - tau_c)
    return Interval(lo=float(q_p), hi=float(hi), lo_open=True, hi_open=True, kind="I_p")


def admissible_s(table, p=None):
    """Interval I'_p of potential exponents s.

    For p in [1, 2] this is the direct display; for p in (2, 2+tau') the
    rewritten dual form (flagged "dual-derived"); empty for p >= 2+tau'.
    Callers intersect with (n/m, inf] per the integrability hypothesis.
    """
    p = table.p if p is None else p
    pf = _frac(p)
    if pf < 1:
        raise ExponentError(f"p must be >= 1, got {float(pf)}")
    tau = _frac(table.tau)
    tau_c = tau / (tau - 1)
    if pf == 2:
        return _singleton(math.inf, "I'_p")
    if pf < 2:
        hi = tau_c * pf / (2 - pf)
        if pf < tau_c:
            return Interval(lo=float(pf), hi=float(hi), lo_open=False, hi_open=True, kind="I'_p")
        lo = pf * (2 - tau_c) / (2 - pf)
        return Interval(lo=float(lo), hi=float(hi), lo_open=True, hi_open=True, kind="I'_p")
    # p > 2: dual route through p'
    if pf >= 2 + tau_c:
        return Interval(lo=0.0, hi=0.0, lo_open=True, hi_open=True, kind="I'_p",
                        empty=True, note=f"empty for p >= 2+tau' = {float(2 + tau_c)}")
    hi = tau_c * pf / (pf - 2)
    if pf <= 4 - tau_c:
        lo = pf * (2 - tau_c) / (pf - 2)
        return Interval(lo=float(lo), hi=float(hi), lo_open=True, hi_open=True,
                        kind="I'_p", note="dual-derived (p > 2)")
    return Interval(lo=float(pf), hi=float(hi), lo_open=False, hi_open=True,
                    kind="I'_p", note="dual-derived (p > 2)")


def integrability_window(table):
    """The (n/m, inf] window every potential exponent must additionally meet."""
    return Interval(lo=table.n / table.m, hi=math.inf, lo_open=True, hi_open=False,
                    kind="integrability")


def dispersive_exponent(table, p, q):
    """Time exponent (n/m)(1/q - 1/p) of the p->q propagator bound."""
    _require_admissible(table, p, q)
    inv_q = 0.0 if q == math.inf else 1.0 / q
    return (table.n / table.m) * (inv_q - 1.0 / p)


def resolvent_exponent(table, p, q):
    """Exponent (n/m)(1/p - 1/q) - 1 of the p->q resolvent bound in |Re lambda|."""
    _require_admissible(table, p, q)
    inv_q = 0.0 if q == math.inf else 1.0 / q
    gap = 1.0 / p - inv_q
    if not gap < table.m / table.n:
        raise ExponentError(
            f"resolvent bound needs 1/p - 1/q < m/n; got {gap} >= {table.m / table.n}")
    return (table.n / table.m) * gap - 1.0


def _require_admissible(table, p, q):
    if abs(p - table.p) > 1e-14:
        raise ExponentError(f"table was computed for p={table.p}, got p={p}")
    interval = admissible_q(table, p)
    if not interval.contains(q):
        raise ExponentError(f"q={q} is not admissible: q must lie in I_p = {interval}")


@dataclass(frozen=True)
class NondegenerateComparison:
    """How the finite-type intervals compare with the nondegenerate theory."""

    m: int
    n: int
    p: float
    tau0: float
    tau1: float | None
    interval_ours: Interval
    interval_reference: Interval | None
    strict_containment: bool | None
    curvature_hypothesis_holds: bool  # n > 3 + 4/(m-2)
    note: str = ""

    def to_dict(self):
        return {
            "m": self.m, "n": self.n, "p": self.p,
            "tau0": self.tau0,
            "tau1": self.tau1,
            "interval_ours": str(self.interval_ours),
            "interval_reference":
                str(self.interval_reference) if self.interval_reference else None,
            "strict_containment": self.strict_containment,
            "curvature_hypothesis_holds": self.curvature_hypothesis_holds,
            "note": self.note,
        }


def compare_nondegenerate(m, n, p):
    """Compare the k=2 admissible interval with the older nondegenerate one.

    Our interval is I_p(tau0) with tau0 = 2(m-1)/(m-2).  The reference theory
    admits (q(tau1, p), p'] with tau1 = 2n(m-1)/(mn-2n-3m+2), defined only when
    that denominator is positive, i.e. exactly when n > 3 + 4/(m-2).
    """
    _validate_mnk(m, n, 2)
    pf = _frac(p)
    if not (1 <= pf < 2):
        raise ExponentError(f"comparison requires 1 <= p < 2, got {float(pf)}")
    table0 = compute_table(m, n, 2, pf)
    tau0 = Fraction(2 * (m - 1), m - 2)  # = n/h(m, n, 2) exactly
    ours = admissible_q(table0, pf)
    hyp = Fraction(n) > 3 + Fraction(4, m - 2)
    denom = m * n - 2 * n - 3 * m + 2
    if denom <= 0:
        return NondegenerateComparison(
            m=m, n=n, p=float(pf), tau0=float(tau0), tau1=None,
            interval_ours=ours, interval_reference=None,
            strict_containment=None, curvature_hypothesis_holds=bool(hyp),
            note="tau1 undefined (denominator <= 0); containment check skipped, "
                 "finite-type interval still applies")
    tau1 = Fraction(2 * n * (m - 1), denom)
    q1 = q_of(tau1, pf)
    p_conj = conjugate(pf)
    reference = Interval(lo=float(q1), hi=float(p_conj) if p_conj != math.inf else math.inf,
                         lo_open=True, hi_open=False, kind="reference")
    q0 = q_of(tau0, pf)
    strict = bool(q0 < q1) and ours.contains(p_conj)
    return NondegenerateComparison(
        m=m, n=n, p=float(pf), tau0=float(tau0), tau1=float(tau1),
        interval_ours=ours, interval_reference=reference,
        strict_containment=strict, curvature_hypothesis_holds=bool(hyp))


@dataclass(frozen=True)
class SpecialGateVerdict:
    """The p <= 3 convenience gate: V in L^{p/|p-2|} with n_p < m/2."""

    p: float
    s: float
    p_in_range: bool
    np_below_half_m: bool
    s_admissible: bool
    admissible: bool
    detail: str

    def to_dict(self):
        return {
            "p": self.p, "s": _json_num(self.s),
            "p_in_range": self.p_in_range,
            "np_below_half_m": self.np_below_half_m,
            "s_admissible": self.s_admissible,
            "admissible": self.admissible,
            "detail": self.detail,
        }


def special_potential_gate(m, n, k, p):
    """Check the specialization p in [1,3], n_p < m/2, s = p/|p-2| against I'_p."""
    pf = _frac(p)
    p_ok = 1 <= pf <= 3
    table = compute_table(m, n, k, pf if pf <= 2 else conjugate(pf))
    n_p = Fraction(n) * abs(Fraction(1, 2) - 1 / pf)
    np_ok = n_p < Fraction(m, 2)
    s = math.inf if pf == 2 else pf / abs(pf - 2)
    s_interval = admissible_s(table, pf)
    window = integrability_window(table)
    s_ok = s_interval.contains(float(s) if s != math.inf else math.inf) and \
        window.contains(float(s) if s != math.inf else math.inf)
    detail = f"s = {_fmt(float(s) if s != math.inf else math.inf)}, I'_p = {s_interval}, window = {window}"
    return SpecialGateVerdict(
        p=float(pf), s=float(s) if s != math.inf else math.inf,
        p_in_range=bool(p_ok), np_below_half_m=bool(np_ok), s_admissible=bool(s_ok),
        admissible=bool(p_ok and np_ok and s_ok), detail=detail)
