"""Rate bounds and certified parameter schedules.

Lower bounds (Gilbert–Varshamov style and the number-field construction) and
the Plotkin upper bound are returned as interval enclosures; parameter
witnesses (r, ell, k) are validated by exact integer conditions backed by the
sieve, and a certificate object records every inequality in the q-range
argument with its enclosure margin and a three-way status.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import mpmath
from mpmath import iv

from . import enclosure as enc
from . import numtheory as nt
from .errors import CapacityError, ConditionFailure, DomainError, IndeterminateError

# rational constants used by the certified inequality chain
C_SQRT_FACTOR = Fraction(6745, 10 ** 4)      # (1 - eps) stays above this
C_LOGD_BOUND = Fraction(2901, 10 ** 4)       # log(D)/(2k) stays below this
C_FINAL_A = Fraction(37, 10)                 # ell * (C_FINAL_A + log ell + log log ell)
C_FINAL_B = Fraction(-139, 100)              # ... <= C_FINAL_B + C_FINAL_C * (k-ish)
C_FINAL_C = Fraction(58, 100)
C_AVG = None  # 1/(1 - log(2/sqrt(pi))), built lazily as an enclosure

_ELIGIBLE_Q = None
_DLOG_CACHE = {}


def eligible_q_floor() -> int:
    """Smallest q admitted by the main schedule: ceil(exp(29))."""
    global _ELIGIBLE_Q
    if _ELIGIBLE_Q is None:
        _ELIGIBLE_Q = enc.resolve_int(lambda: iv.exp(iv.mpf(29)), enc.ceil_exact)
    return _ELIGIBLE_Q


@dataclass(frozen=True)
class ParamWitness:
    """(r, ell, k) passing the three construction conditions at q.

    Nq counts primes p = 3 (mod 4) with p > p_ell and r <= p^2 <= q (exact);
    D_log encloses log(4 * p_1 * ... * p_ell).
    """

    q: int
    r: int
    ell: int
    k: int
    p_ell: int
    Nq: int
    D_log: object


@dataclass(frozen=True)
class Schedule:
    name: str
    q: int
    eps: object  # HighReal
    r: int
    ell: int
    k: int
    eligible: bool


@dataclass(frozen=True)
class CertCheck:
    name: str
    lhs: str
    rhs: str
    margin: str
    width: str
    status: str

    def as_dict(self):
        return {"name": self.name, "lhs": self.lhs, "rhs": self.rhs,
                "margin": self.margin, "width": self.width, "status": self.status}


@dataclass(frozen=True)
class Certificate:
    q: int
    schedule: str
    witness: Optional[ParamWitness]
    checks: tuple
    overall: str

    def as_dict(self):
        w = None
        if self.witness is not None:
            w = {"r": self.witness.r, "ell": self.witness.ell,
                 "k": self.witness.k, "Nq": self.witness.Nq}
        return {"q": self.q, "schedule": self.schedule, "witness": w,
                "checks": [c.as_dict() for c in self.checks],
                "overall": self.overall}


@dataclass(frozen=True)
class BoundPoint:
    q: int
    delta: object
    gv: object
    plotkin: object
    nfc: Optional[object]
    witness: Optional[ParamWitness]


@dataclass(frozen=True)
class SearchOutcome:
    q: int
    delta: object
    witness: Optional[ParamWitness]
    nfc: Optional[object]
    gv: object
    beats_gv: Optional[bool]
    note: str


@dataclass(frozen=True)
class ScanResult:
    first_violation: Optional[int]
    argmin_ell: int
    min_margin: object  # HighReal


def _as_fraction(delta) -> Fraction:
    if isinstance(delta, Fraction):
        return delta
    if isinstance(delta, int):
        return Fraction(delta)
    if isinstance(delta, float):
        return Fraction(delta)
    raise DomainError("delta must be int, float, or Fraction, got %r" % (delta,))


def _check_q(q: int) -> int:
    if not isinstance(q, int) or q < 2:
        raise DomainError("q must be an integer >= 2, got %r" % (q,))
    return q


def gv_bound(q: int, delta) -> enc.HighReal:
    """Gilbert–Varshamov rate lower bound at relative distance delta.

    Exactly zero (a zero-width enclosure) once delta >= 1 - 1/q.
    """
    _check_q(q)
    dfrac = _as_fraction(delta)
    if not 0 < dfrac < 1:
        raise DomainError("delta must lie in (0, 1), got %r" % (delta,))
    if dfrac >= Fraction(q - 1, q):
        return iv.mpf(0)
    d = enc.enc(dfrac)
    logq = iv.log(iv.mpf(q))
    entropy = -d * iv.log(d) - (1 - d) * iv.log(1 - d)
    return 1 - (d * iv.log(iv.mpf(q - 1)) + entropy) / logq


def gv_asymptotic(q: int, delta) -> enc.HighReal:
    """First-order form 1 - delta - h(delta)/log q (natural-log entropy h)."""
    _check_q(q)
    dfrac = _as_fraction(delta)
    if not 0 < dfrac < 1:
        raise DomainError("delta must lie in (0, 1), got %r" % (delta,))
    d = enc.enc(dfrac)
    h = -d * iv.log(d) - (1 - d) * iv.log(1 - d)
    return 1 - d - h / iv.log(iv.mpf(q))


def plotkin_bound(q: int, delta) -> enc.HighReal:
    """Plotkin rate upper bound; affine piece evaluated in exact rationals."""
    _check_q(q)
    dfrac = _as_fraction(delta)
    if not 0 < dfrac < 1:
        raise DomainError("delta must lie in (0, 1), got %r" % (delta,))
    val = 1 - dfrac * Fraction(q, q - 1)
    if val <= 0:
        return iv.mpf(0)
    return enc.enc(val)


def nfc_bound(q: int, delta, witness: ParamWitness) -> enc.HighReal:
    """Rate lower bound from the number-field construction at the witness.

    (1 - delta) * log(r)/log(q) - log(D) / (2k log q) with D the primorial
    4 p_1 ... p_ell of the witness.
    """
    _check_q(q)
    if witness.q != q:
        raise DomainError("witness was certified at q=%d, not q=%d" % (witness.q, q))
    dfrac = _as_fraction(delta)
    if not 0 < dfrac < 1:
        raise DomainError("delta must lie in (0, 1), got %r" % (delta,))
    d = enc.enc(dfrac)
    logq = iv.log(iv.mpf(q))
    return ((1 - d) * iv.log(iv.mpf(witness.r)) - witness.D_log / (2 * witness.k)) / logq


def _dlog(ell: int):
    if ell not in _DLOG_CACHE:
        _DLOG_CACHE[ell] = nt.primorial_D(ell)[1]
    return _DLOG_CACHE[ell]


def _count_Nq(q: int, r: int, p_ell: int) -> int:
    """Primes p = 3 (mod 4), p > p_ell, r <= p^2 <= q. Exact."""
    lo = max(p_ell + 1, math.isqrt(max(r - 1, 0)) + 1)
    hi = math.isqrt(q)
    if hi < lo:
        return 0
    return nt.table_for(hi).count_3mod4_in(lo, hi)


def _evaluate_conditions(q: int, r: int, ell: int, k: int):
    """Exact evaluation of the three construction conditions.

    Returns (rows, witness_or_None); each row is
    (name, lhs_int, rhs_int, margin_int, ok).
    """
    _check_q(q)
    if ell < 1:
        raise DomainError("ell must be >= 1")
    rows = []
    ok1 = 2 <= r <= q
    rows.append(("condition1_r_in_range", r, q, min(r - 2, q - r), ok1))
    lhs2 = 4 * (k + 2)
    rhs2 = (ell - 2) ** 2 - 4 * (ell - 2)
    ok2 = k >= 1 and lhs2 <= rhs2
    rows.append(("condition2_k_within_quadratic", lhs2, rhs2, rhs2 - lhs2, ok2))
    p_ell = nt.nth_prime(ell)
    if r >= 2:
        Nq = _count_Nq(q, r, p_ell)
    else:
        Nq = 0
    ok3 = k >= 1 and Nq >= 2 * k
    rows.append(("condition3_enough_inert_primes", 2 * k, Nq, Nq - 2 * k, ok3))
    witness = None
    if ok1 and ok2 and ok3:
        witness = ParamWitness(q=q, r=r, ell=ell, k=k, p_ell=p_ell, Nq=Nq,
                               D_log=_dlog(ell))
    return rows, witness


def check_conditions(q: int, r: int, ell: int, k: int) -> ParamWitness:
    """Validate (r, ell, k) at q; raises ConditionFailure naming what failed."""
    rows, witness = _evaluate_conditions(q, r, ell, k)
    if witness is None:
        raise ConditionFailure(
            ["%s: %d vs %d" % (name, lhs, rhs)
             for (name, lhs, rhs, margin, ok) in rows if not ok])
    return witness


def theorem2_schedule(q: int) -> Schedule:
    """Main parameter schedule: eps = (log q)^(-1/3), r = ceil((1-eps)^2 q),
    ell = floor(q^(1/6)), k = floor((ell-2)^2/4 - (ell-2)) - 2.

    Defined for q >= 3; flagged eligible only from ceil(exp(29)) upward.
    """
    _check_q(q)
    if q < 3:
        raise DomainError("the schedule needs q >= 3 (log q > 1)")

    def _eps():
        return 1 / enc.root(iv.log(iv.mpf(q)), 3)

    eps = _eps()
    r = enc.resolve_int(lambda: (1 - _eps()) ** 2 * q, enc.ceil_exact)
    ell = nt.int_nth_root(q, 6)
    k = ((ell - 2) ** 2 - 4 * (ell - 2)) // 4 - 2
    return Schedule(name="theorem2", q=q, eps=eps, r=r, ell=ell, k=k,
                    eligible=q >= eligible_q_floor())


def theorem1_schedule(q: int, C0) -> Schedule:
    """Alternate schedule eps = (log q)(log log q)/(C0 q^(1/6)); C0 is input.

    The leading constant is configuration, not a guess; the schedule is
    eligible whenever the resulting eps lies in (0, 1).
    """
    _check_q(q)
    if q < 3:
        raise DomainError("the schedule needs q >= 3")
    c0 = enc.enc(C0 if not isinstance(C0, float) else Fraction(C0))
    if enc.gt_status(c0, 0) != enc.PASS:
        raise DomainError("C0 must be certifiably positive")

    def _eps():
        logq = iv.log(iv.mpf(q))
        return logq * iv.log(logq) / (c0 * enc.root(iv.mpf(q), 6))

    eps = _eps()
    ok = (enc.gt_status(eps, 0) == enc.PASS and enc.lt_status(eps, 1) == enc.PASS)
    if not ok:
        raise DomainError("eps outside (0, 1) for q=%d, C0=%s" % (q, C0))
    r = enc.resolve_int(lambda: (1 - _eps()) ** 2 * q, enc.ceil_exact)
    ell = nt.int_nth_root(q, 6)
    k = ((ell - 2) ** 2 - 4 * (ell - 2)) // 4 - 2
    return Schedule(name="theorem1", q=q, eps=eps, r=r, ell=ell, k=k,
                    eligible=True)


def _mk_check(name: str, lhs, rhs, ok=None) -> CertCheck:
    """Build a check row; if ok is None the status comes from the enclosures."""
    lhs_e, rhs_e = enc.enc(lhs), enc.enc(rhs)
    margin = rhs_e - lhs_e
    if ok is None:
        status = enc.gt_status(margin, 0)
    else:
        status = enc.PASS if ok else enc.FAIL
    return CertCheck(name=name, lhs=enc.fmt(lhs_e), rhs=enc.fmt(rhs_e),
                     margin=enc.fmt(margin), width=enc.fmt_width(margin),
                     status=status)


def _skipped_check(name: str, reason: str) -> CertCheck:
    return CertCheck(name=name, lhs="-", rhs="-", margin="-",
                     width=reason, status=enc.FAIL)


def _tristate(status: str):
    if status == enc.PASS:
        return True
    if status == enc.FAIL:
        return False
    return None


def _final_inequality_sides(ell: int):
    if ell < 3:
        raise DomainError("final inequality needs ell >= 3 (log log ell)")
    le = iv.log(iv.mpf(ell))
    lhs = ell * (enc.enc(C_FINAL_A) + le + iv.log(le))
    quad = enc.enc(Fraction((ell - 2) ** 2, 4) - (ell - 2) - 3)
    rhs = enc.enc(C_FINAL_B) + enc.enc(C_FINAL_C) * quad
    return lhs, rhs


def final_inequality_margin(ell: int) -> enc.HighReal:
    """Margin of ell(3.7 + log ell + log log ell) <= -1.39 + 0.58((ell-2)^2/4
    - (ell-2) - 3); positive means the inequality holds. Needs ell >= 3."""
    lhs, rhs = _final_inequality_sides(ell)
    return rhs - lhs


def final_inequality_scan(ell_lo: int, ell_hi: int) -> ScanResult:
    """Scan the inequality over [ell_lo, ell_hi]; floats with a guard band,
    escalating to enclosures near the boundary. Returns the first violation
    (None if none) and the minimum certified margin with its location."""
    if ell_lo < 3 or ell_hi < ell_lo:
        raise DomainError("need 3 <= ell_lo <= ell_hi")
    a, b, c = float(C_FINAL_A), float(C_FINAL_B), float(C_FINAL_C)
    best = (math.inf, -1)
    first_violation = None
    for ell in range(ell_lo, ell_hi + 1):
        le = math.log(ell)
        lhs = ell * (a + le + math.log(le))
        rhs = b + c * ((ell - 2) ** 2 / 4 - (ell - 2) - 3)
        m = rhs - lhs
        guard = 1e-9 * (abs(lhs) + abs(rhs) + 1)
        if m < guard:
            status = enc.is_positive(final_inequality_margin(ell))
            if status == enc.FAIL:
                if first_violation is None:
                    first_violation = ell
            elif status == enc.INDETERMINATE:
                raise IndeterminateError("margin at ell=%d straddles 0" % ell)
        if m < best[0]:
            best = (m, ell)
    margin = final_inequality_margin(best[1])
    return ScanResult(first_violation=first_violation, argmin_ell=best[1],
                      min_margin=margin)


def certify(q: int, schedule: str = "theorem2", C0=None) -> Certificate:
    """Full certificate at q: schedule, witness conditions, and the certified
    inequality chain, each with enclosure margins and three-way statuses.

    Deterministic: same q, schedule, and precision give identical output.
    """
    _check_q(q)
    checks = []
    if schedule == "theorem2":
        sch = theorem2_schedule(q)
        qfloor = eligible_q_floor()
        checks.append(_mk_check("eligible_q_at_least_ceil_exp29", qfloor, q,
                                ok=(q >= qfloor)))
    elif schedule == "theorem1":
        if C0 is None:
            raise DomainError("theorem1 schedule requires C0")
        sch = theorem1_schedule(q, C0)
        checks.append(_mk_check("eligible_eps_in_unit_interval", sch.eps, 1))
    else:
        raise DomainError("unknown schedule %r" % (schedule,))

    rows, witness = _evaluate_conditions(q, sch.r, sch.ell, sch.k)
    for (name, lhs, rhs, margin, ok) in rows:
        checks.append(_mk_check(name, lhs, rhs, ok=ok))

    ell, r, k = sch.ell, sch.r, sch.k
    p_ell = nt.nth_prime(ell)

    # sqrt(r) > 0.6745 sqrt(q), decided exactly on squares
    num, den = C_SQRT_FACTOR.numerator, C_SQRT_FACTOR.denominator
    ok_a1 = r * den * den > num * num * q
    checks.append(_mk_check("chain_sqrt_r_above_const_sqrt_q",
                            enc.enc(C_SQRT_FACTOR) * iv.sqrt(iv.mpf(q)),
                            iv.sqrt(iv.mpf(r)), ok=ok_a1))
    ell_log_term = 24 * ell * iv.log(iv.mpf(ell)) if ell >= 2 else iv.mpf(0)
    checks.append(_mk_check("chain_const_sqrt_q_above_24_ell_log_ell",
                            ell_log_term,
                            enc.enc(C_SQRT_FACTOR) * iv.sqrt(iv.mpf(q))))
    st = enc.ge_status(ell_log_term, p_ell)
    checks.append(_mk_check("chain_24_ell_log_ell_at_least_p_ell",
                            p_ell, ell_log_term, ok=_tristate(st)))

    if witness is not None:
        ratio = witness.D_log / (2 * witness.k)
        bound = enc.enc(C_LOGD_BOUND)
        st = enc.le_status(ratio, bound)
        checks.append(_mk_check("primorial_log_over_2k_bounded",
                                ratio, bound, ok=_tristate(st)))
    else:
        checks.append(_skipped_check("primorial_log_over_2k_bounded",
                                     "no witness"))

    theta = nt.chebyshev_theta(p_ell)
    logp = iv.log(iv.mpf(p_ell))
    checks.append(_mk_check("theta_p_ell_below_rosser_bound",
                            theta, (1 + 3 / logp) * p_ell))
    checks.append(_mk_check("p_ell_over_log_p_ell_below_ell",
                            iv.mpf(p_ell) / logp, iv.mpf(ell)))

    if ell >= 3:
        lhs_f, rhs_f = _final_inequality_sides(ell)
        checks.append(_mk_check("final_inequality_at_ell", lhs_f, rhs_f))
    else:
        checks.append(_skipped_check("final_inequality_at_ell", "ell < 3"))

    if witness is not None:
        half = Fraction(1, 2)
        gv_half = gv_bound(q, half)
        nfc_half = nfc_bound(q, half, witness)
        checks.append(_mk_check("nfc_rate_beats_gv_at_half", gv_half, nfc_half))
    else:
        checks.append(_skipped_check("nfc_rate_beats_gv_at_half", "no witness"))

    statuses = [c.status for c in checks]
    if any(s == enc.FAIL for s in statuses):
        overall = enc.FAIL
    elif any(s == enc.INDETERMINATE for s in statuses):
        overall = enc.INDETERMINATE
    else:
        overall = enc.PASS
    return Certificate(q=q, schedule=sch.name, witness=witness,
                       checks=tuple(checks), overall=overall)


def certify_theorem2(q: int) -> Certificate:
    return certify(q, "theorem2")


def search_params(q: int, delta, budget: int = 8) -> SearchOutcome:
    """Deterministic witness search maximizing the construction rate bound.

    Candidate r values come from eps = 2^-i (i <= budget) plus the main
    schedule when eligible; ell ranges over [3, 2 floor(q^(1/6)) + 2]; k is
    the largest value allowed by the quadratic condition and the available
    prime count. The best certified witness by enclosure midpoint wins, ties
    to smaller (ell, r).
    """
    _check_q(q)
    dfrac = _as_fraction(delta)
    if not 0 < dfrac < 1:
        raise DomainError("delta must lie in (0, 1), got %r" % (delta,))
    if budget < 1:
        raise DomainError("budget must be >= 1")
    gv = gv_bound(q, dfrac)

    r_candidates = []
    for i in range(1, budget + 1):
        num = (2 ** i - 1) ** 2 * q
        den = 4 ** i
        r_candidates.append(-(-num // den))  # ceil((1 - 2^-i)^2 q)
    sch = None
    if q >= 3:
        sch = theorem2_schedule(q)
        if sch.eligible:
            r_candidates.append(sch.r)
    r_candidates = sorted(set(r for r in r_candidates if 2 <= r <= q))

    ell_hi = 2 * nt.int_nth_root(q, 6) + 2
    best = None  # (mid, -ell, -r, witness, nfc)
    for r in r_candidates:
        for ell in range(3, ell_hi + 1):
            k_quad = ((ell - 2) ** 2 - 4 * (ell - 2)) // 4 - 2
            if k_quad < 1:
                continue
            p_ell = nt.nth_prime(ell)
            Nq = _count_Nq(q, r, p_ell)
            k = min(k_quad, Nq // 2)
            if k < 1:
                continue
            try:
                w = check_conditions(q, r, ell, k)
            except ConditionFailure:
                continue
            val = nfc_bound(q, dfrac, w)
            mid = enc.midpoint(val)
            key = (mid, -ell, -r)
            if best is None or key > best[0]:
                best = (key, w, val)
    if sch is not None and sch.eligible:
        try:
            w = check_conditions(q, sch.r, sch.ell, sch.k)
            val = nfc_bound(q, dfrac, w)
            key = (enc.midpoint(val), -sch.ell, -sch.r)
            if best is None or key > best[0]:
                best = (key, w, val)
        except ConditionFailure:
            pass
    if best is None:
        return SearchOutcome(q=q, delta=dfrac, witness=None, nfc=None, gv=gv,
                             beats_gv=None, note="no certified witness in budget")
    _, w, val = best
    beats = enc.gt_status(val, gv) == enc.PASS
    return SearchOutcome(q=q, delta=dfrac, witness=w, nfc=val, gv=gv,
                         beats_gv=beats, note="")


def bound_point(q: int, delta, budget: int = 8) -> BoundPoint:
    """One sweep row: gv and plotkin always, nfc when a witness certifies."""
    outcome = search_params(q, delta, budget=budget)
    return BoundPoint(q=q, delta=outcome.delta,
                      gv=outcome.gv,
                      plotkin=plotkin_bound(q, delta),
                      nfc=outcome.nfc, witness=outcome.witness)


def a_rq_upper_bounds(r: int, q: int):
    """Three upper bounds on the number of usable prime ideals A(r, q):
    the averaging constant times pi(q), the ratio q/log r, and the constant
    1/(1 - log(2/sqrt(pi))) itself. Needs the sieve up to q (capacity-bound).
    """
    if not 2 <= r <= q:
        raise DomainError("need 2 <= r <= q")
    pi_q = nt.table_for(q).count(q)
    c = 1 / (1 - iv.log(2 / iv.sqrt(iv.pi)))
    return {
        "averaging": c * pi_q,
        "volume": iv.mpf(q) / iv.log(iv.mpf(r)),
        "constant": c,
    }


def growth_proxy(q: int, delta, rate_lower) -> enc.HighReal:
    """log(1/(1 - delta - rate)) / log(q); needs rate certifiably < 1 - delta."""
    _check_q(q)
    dfrac = _as_fraction(delta)
    if not 0 < dfrac < 1:
        raise DomainError("delta must lie in (0, 1)")
    gap = 1 - enc.enc(dfrac) - enc.enc(rate_lower)
    if enc.gt_status(gap, 0) != enc.PASS:
        raise DomainError("rate bound must be certifiably below 1 - delta")
    return -iv.log(gap) / iv.log(iv.mpf(q))
