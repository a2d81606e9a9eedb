"""End-to-end acceptance checks, one printed verdict line per criterion.

Each test prints exactly one line of the form

    [acceptance] criterion N: PASS - <details>

before asserting, so `pytest tests/test_acceptance.py -s` gives a compact
scoreboard. The tests re-derive every claimed number through routes that are
independent of the library internals (trial division, direct grid scans,
60-digit plain mpmath arithmetic) wherever a value is not a definition.
"""

import math
import random
import time
from fractions import Fraction

import mpmath
import numpy as np
from mpmath import iv, mp

from gvforge import bounds as bd
from gvforge import enclosure as encl
from gvforge import lenstra as ln
from gvforge import numtheory as nt
from gvforge import quadfield as qf

Q42 = 2 ** 42
Q_FLOOR = 3931334297145  # floor(exp(29)) + 1, the smallest eligible q


def _report(num: int, ok: bool, detail: str) -> None:
    print("[acceptance] criterion %d: %s - %s"
          % (num, "PASS" if ok else "FAIL", detail))


# ------------------------------------------------ 1: certified schedules


def test_criterion_1_certify_reference_scales():
    t0 = time.perf_counter()
    c42 = bd.certify(Q42)
    cfl = bd.certify(Q_FLOOR)
    elapsed = time.perf_counter() - t0

    w = cfl.witness
    ratio = w.D_log / encl.enc(2 * w.k)
    with mp.workdps(50):
        ratio_hi = float(encl.upper(ratio))

    below = bd.certify(Q_FLOOR - 1)
    failing_below = [c.name for c in below.checks if c.status == "fail"]

    ok = (c42.overall == "pass"
          and cfl.overall == "pass"
          and (w.r, w.ell, w.k, w.p_ell, w.Nq)
          == (1788629061766, 125, 3657, 691, 22529)
          and nt.nth_prime(125) == 691
          and w.Nq >= 2 * w.k
          and c42.witness.Nq == 23690
          and c42.witness.Nq >= 2 * c42.witness.k
          and ratio_hi <= 0.2901
          and below.overall == "fail"
          and failing_below == ["eligible_q_at_least_ceil_exp29"]
          and elapsed < 60.0)
    _report(1, ok,
            "certify(2^42) and certify(%d) both pass in %.2fs; floor witness "
            "ell=%d p_ell=%d k=%d Nq=%d (>= 2k=%d), primorial log ratio <= "
            "%.4f; at floor-1 exactly the eligibility check fails"
            % (Q_FLOOR, elapsed, w.ell, w.p_ell, w.k, w.Nq, 2 * w.k, ratio_hi))
    assert ok, (c42.overall, cfl.overall, w, ratio_hi, failing_below, elapsed)


# ------------------------------------------ 2: rate separation at delta=1/2


def test_criterion_2_rate_separation_at_half():
    cert = bd.certify(Q42)
    gv = bd.gv_bound(Q42, Fraction(1, 2))
    nfc = bd.nfc_bound(Q42, Fraction(1, 2), cert.witness)
    margin = nfc - gv
    verdict = encl.is_positive(margin)
    with mp.workdps(50):
        lo = encl.lower(margin)
        wd = encl.width(margin)
        mid = float(encl.midpoint(margin))
        rel = float(wd / lo) if lo > 0 else float("inf")
        wd_f = float(wd)
    ok = verdict == "pass" and rel < 1e-6
    _report(2, ok,
            "nfc(2^42, 1/2) - gv(2^42, 1/2) = %.12f, certified positive, "
            "enclosure width %.2e (relative %.2e < 1e-6)" % (mid, wd_f, rel))
    assert ok, (verdict, mid, wd_f, rel)


# ------------------------------------------------- 3: small concrete codes

# Hand-picked (disc, r, q, G) with |disc| <= 40, q <= 50, and M <= 10^4.
SMALL_INSTANCES = [
    (-3, 4, 7, 1), (-3, 9, 13, 2), (-3, 43, 43, 2),
    (-4, 9, 13, 1), (-4, 9, 13, 3), (-4, 4, 25, 2), (-4, 40, 41, 2),
    (-4, 29, 37, 2), (-7, 8, 11, 2), (-8, 9, 17, 2), (-11, 5, 23, 2),
    (-15, 4, 17, 1), (-19, 5, 17, 1), (-20, 9, 29, 2), (-23, 6, 13, 1),
    (-40, 7, 41, 1),
    (5, 4, 11, 1), (8, 3, 7, 1), (12, 5, 23, 2), (13, 4, 17, 1),
    (17, 5, 19, 2), (21, 5, 17, 1), (24, 5, 23, 2), (28, 6, 13, 1),
    (33, 6, 29, 1), (40, 7, 37, 2),
]


def test_criterion_3_small_codes_build_and_verify():
    bad = []
    n_max = m_max = 0
    for (D, r, q, G) in SMALL_INSTANCES:
        K = qf.make_field(D)
        code = ln.build_code(K, r, q, G)
        chk = ln.verify_code(code)
        gap = ln.norm_gap_check(code)
        n_max = max(n_max, code.n)
        m_max = max(m_max, chk.M)
        if not (chk.ok and gap and chk.M <= 10 ** 4):
            bad.append((D, r, q, G, chk.ok, gap, chk.M))
    ok = not bad and len(SMALL_INSTANCES) >= 20
    _report(3, ok,
            "%d/%d instances with |disc| <= 40, q <= 50 build, verify, and "
            "pass the norm gap check (n up to %d, M up to %d)"
            % (len(SMALL_INSTANCES) - len(bad), len(SMALL_INSTANCES),
               n_max, m_max))
    assert ok, bad


# -------------------------------------- 4: counts vs an independent scan


def _float_basis(D: int):
    """Embedding matrix in doubles, written from the definitions."""
    if D % 4 == 0:
        d = D // 4
        if D < 0:
            return (1.0, 0.0, 0.0, math.sqrt(-d))
        return (1.0, math.sqrt(d), 1.0, -math.sqrt(d))
    if D < 0:
        return (1.0, 0.5, 0.0, math.sqrt(-D) / 2)
    return (1.0, (1 + math.sqrt(D)) / 2, 1.0, (1 - math.sqrt(D)) / 2)


def _embed_mp(D: int, u: int, v: int):
    if D % 4 == 0:
        d = D // 4
        if D < 0:
            return mp.mpf(u), v * mp.sqrt(-d)
        return u + v * mp.sqrt(d), u - v * mp.sqrt(d)
    if D < 0:
        return u + mp.mpf(v) / 2, v * mp.sqrt(-D) / 2
    return u + v * (1 + mp.sqrt(D)) / 2, u + v * (1 - mp.sqrt(D)) / 2


def _scan_count(D: int, box) -> int:
    """Count lattice points strictly inside the box by direct grid scan.

    Doubles classify everything farther than 1e-7 * scale from the faces;
    the few candidates inside that band are settled at 60 digits, and any
    point within 1e-20 * scale of a face is treated as a hard failure.
    """
    b00, b01, b10, b11 = _float_basis(D)
    t1 = float(encl.midpoint(box.tau1))
    t2 = float(encl.midpoint(box.tau2))
    rho = float(encl.midpoint(box.rho))
    det = b00 * b11 - b01 * b10
    corners = [(t1 + i * rho, t2 + j * rho) for i in (0, 1) for j in (0, 1)]
    us = [(b11 * x0 - b01 * x1) / det for x0, x1 in corners]
    vs = [(b00 * x1 - b10 * x0) / det for x0, x1 in corners]
    U = np.arange(math.floor(min(us)) - 2, math.ceil(max(us)) + 3)
    V = np.arange(math.floor(min(vs)) - 2, math.ceil(max(vs)) + 3)
    UU, VV = np.meshgrid(U, V, indexing="ij")
    x0 = b00 * UU + b01 * VV
    x1 = b10 * UU + b11 * VV
    scale = 1.0 + abs(t1) + abs(t2) + rho
    band = 1e-7 * scale
    dist = np.stack([x0 - t1, t1 + rho - x0, x1 - t2, t2 + rho - x1])
    strict = (dist > band).all(axis=0)
    loose = (dist > -band).all(axis=0)
    count = int(strict.sum())
    with mp.workdps(60):
        mt1 = mp.mpf(mpmath.nstr(encl.midpoint(box.tau1), 40))
        mt2 = mp.mpf(mpmath.nstr(encl.midpoint(box.tau2), 40))
        mrho = mp.mpf(mpmath.nstr(encl.midpoint(box.rho), 40))
        guard = mp.mpf("1e-20") * scale
        for u, v in zip(UU[loose & ~strict], VV[loose & ~strict]):
            y0, y1 = _embed_mp(D, int(u), int(v))
            dists = (y0 - mt1, mt1 + mrho - y0, y1 - mt2, mt2 + mrho - y1)
            assert all(abs(z) > guard for z in dists), (D, u, v, "face contact")
            if all(z > 0 for z in dists):
                count += 1
    return count


FUNDAMENTAL_POOL = [-3, -4, -7, -8, -11, -15, -19, -20, -23, -24, -31, -35,
                    -39, -40, 5, 8, 12, 13, 17, 21, 24, 28, 29, 33, 37, 40]


def test_criterion_4_box_counts_match_independent_scan():
    rng = random.Random(20240817)
    bad = []
    done = 0
    while done < 100:
        D = rng.choice(FUNDAMENTAL_POOL)
        r = rng.randint(2, 12)
        G = rng.choice((1, 2))
        if r ** G > 300:
            continue
        E = ln.make_embedding(qf.make_field(D))
        box = ln.find_tau(E, r, G, start_grid=16)
        pts = ln.enumerate_omega(E, box)
        want = ln.minkowski_target(r, G, abs(D))
        got = _scan_count(D, box)
        if len(pts) != got or len(pts) < want:
            bad.append((D, r, G, len(pts), got, want))
        done += 1
    ok = not bad
    _report(4, ok,
            "%d/100 random boxes agree with the direct scan and meet the "
            "ceil(r^G/sqrt|disc|) target" % (100 - len(bad)))
    assert ok, bad


# --------------------------------------- 5: two-rank equals genus bound


def test_criterion_5_two_rank_genus_identity():
    bad = []
    n_fields = 0
    for D in range(-3, -10 ** 4, -1):
        if not qf.is_fundamental(D):
            continue
        K = qf.make_field(D)
        cg = qf.class_group_imaginary(K)
        mu = len(K.prime_divisors)
        if cg.two_rank != mu - 1 or cg.two_rank != qf.genus_two_rank_lower(K):
            bad.append((D, cg.two_rank, mu))
        n_fields += 1
    ok = not bad and n_fields > 3000
    _report(5, ok,
            "exact 2-rank equals (number of prime divisors) - 1 for all "
            "%d fundamental discriminants in (-10^4, 0)" % n_fields)
    assert ok, (bad[:10], n_fields)


# ----------------------------------------------- 6: tower base field


def test_criterion_6_tower_base_discriminant():
    K = qf.make_field(-19399380)
    cg = qf.class_group_imaginary(K)
    cert = qf.golod_shafarevich_check(K, cg.two_rank, 0)
    thr_ok = encl.contains(cert.threshold, 2 + 2 * mp.sqrt(2))
    ok = (cg.h == 1536 and cg.two_rank == 7 and cert.passes and thr_ok
          and (cg.two_rank - 2) ** 2 >= 4 * (0 + K.archimedean_places + 1))
    _report(6, ok,
            "disc -19399380: exact h=%d, 2-rank=%d, d2=7 clears the "
            "2 + 2*sqrt(2) threshold (integer form 25 >= 8)"
            % (cg.h, cg.two_rank))
    assert ok, (cg, cert.passes, thr_ok)


# ------------------------------------------- 7: inequality tail scan


def test_criterion_7_final_inequality_tail():
    scan = bd.final_inequality_scan(125, 10 ** 5)
    verdict = encl.is_positive(scan.min_margin)
    with mp.workdps(50):
        min_mid = float(encl.midpoint(scan.min_margin))
    ok = (scan.first_violation is None and scan.argmin_ell == 125
          and verdict == "pass")
    _report(7, ok,
            "margin positive for every ell in [125, 10^5], minimum %.4f "
            "attained at ell=%d, no violations" % (min_mid, scan.argmin_ell))
    assert ok, (scan.first_violation, scan.argmin_ell, verdict)


# --------------------------- 8: edge zeros and the residue-class window


def test_criterion_8_edge_zeros_and_ap_window():
    bad_edge = []
    for q in range(2, 10 ** 4 + 1):
        delta = Fraction(q - 1, q)
        g = bd.gv_bound(q, delta)
        p = bd.plotkin_bound(q, delta)
        with mp.workdps(50):
            g_zero = encl.midpoint(g) == 0 and encl.width(g) == 0
            p_zero = encl.midpoint(p) == 0 and encl.width(p) == 0
        if not (g_zero and p_zero):
            bad_edge.append(q)

    rng = random.Random(20240817)
    xs = sorted(rng.randint(10 ** 3, 2 * 10 ** 6) for _ in range(1000))
    half = encl.enc(Fraction(1, 2))
    coeff = encl.enc(Fraction(53, 100))
    bad_window = []
    worst = 0.0
    for x in xs:
        lhs = abs(encl.enc(nt.prime_count_ap(x, 4, 3))
                  - nt.log_integral(x) * half)
        rhs = coeff * x / encl.enc(iv.log(iv.mpf(x))) ** 2
        if encl.lt_status(lhs, rhs) != "pass":
            bad_window.append(x)
            continue
        with mp.workdps(50):
            worst = max(worst, float(encl.upper(lhs) / encl.lower(rhs)))
    ok = not bad_edge and not bad_window
    _report(8, ok,
            "gv and plotkin are exact zeros at delta=(q-1)/q for all q <= "
            "10^4; |pi(x;4,3) - Li(x)/2| < 0.53 x/log^2 x certified at 1000 "
            "points up to 2*10^6 (worst ratio %.3f)" % worst)
    assert ok, (bad_edge[:5], bad_window[:5])
