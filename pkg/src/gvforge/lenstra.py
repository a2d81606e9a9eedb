"""Code construction from quadratic-field lattices.

The ring of integers embeds into R^2 (real pair or complex-as-real pair);
an open axis-aligned box of volume r^G placed by a certified translate
captures at least ceil(r^G / sqrt|disc|) lattice points, and reduction of
those points modulo n prime ideals of norm in [r, q] yields length-n words
over [0, q) with minimum distance at least n + 1 - G.

Box membership is decided with interval arithmetic: every point is either
certainly inside or certainly outside, and a point that cannot be separated
from a face raises BoundaryContact (the search then nudges the translate).
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import mpmath
import numpy as np
from mpmath import iv

from . import enclosure as enc
from . import numtheory as nt
from .errors import BoundaryContact, CapacityError, DomainError, TauSearchError
from .quadfield import (INERT, PrimeIdealRecord, QuadraticField,
                        prime_ideals_in_norm_range)

OMEGA_CAP = 10 ** 6
PAIRWISE_CAP = 10 ** 5
_GRID_OFFSET = Fraction(1, 1 << 20)
_BUMP = Fraction(1, 1 << 40)


@dataclass(frozen=True)
class LatticeEmbedding:
    """Integral basis image in R^2: columns are the images of 1 and omega."""

    field: QuadraticField
    b00: object
    b01: object
    b10: object
    b11: object  # HighReal entries; x = (b00 u + b01 v, b10 u + b11 v)
    covolume: object  # HighReal, equals 2^-t sqrt|disc|

    @property
    def floats(self):
        return (float(enc.midpoint(self.b00)), float(enc.midpoint(self.b01)),
                float(enc.midpoint(self.b10)), float(enc.midpoint(self.b11)))


@dataclass(frozen=True)
class BoxSpec:
    """Open box (tau_1, tau_1 + rho) x (tau_2, tau_2 + rho), side enclosed."""

    rho: object
    tau1: object
    tau2: object
    r: int
    G: int
    grid: int
    cell: tuple
    bumps: int


@dataclass(frozen=True)
class LenstraCode:
    disc: int
    q: int
    r: int
    G: int
    n: int
    tau: tuple
    ideals: tuple
    omega: tuple
    codewords: tuple


@dataclass(frozen=True)
class CodeCheck:
    M: int
    d: int
    ok: bool
    injective: bool
    min_target: int
    worst_pair: Optional[tuple]


def make_embedding(K: QuadraticField) -> LatticeEmbedding:
    """Minkowski-style embedding of the ring of integers of K into R^2."""
    D = K.disc
    if D % 4 == 0:
        d = K.radicand
        if D < 0:
            root = iv.sqrt(iv.mpf(-d))
            b = (iv.mpf(1), iv.mpf(0), iv.mpf(0), root)
        else:
            root = iv.sqrt(iv.mpf(d))
            b = (iv.mpf(1), root, iv.mpf(1), -root)
    else:
        if D < 0:
            root = iv.sqrt(iv.mpf(-D))
            b = (iv.mpf(1), iv.mpf(1) / 2, iv.mpf(0), root / 2)
        else:
            root = iv.sqrt(iv.mpf(D))
            b = (iv.mpf(1), (1 + root) / 2, iv.mpf(1), (1 - root) / 2)
    covol = iv.sqrt(iv.mpf(abs(D))) / (2 ** K.t)
    return LatticeEmbedding(field=K, b00=b[0], b01=b[1], b10=b[2], b11=b[3],
                            covolume=covol)


def box_side(K: QuadraticField, r: int, G: int):
    """rho with rho^2 = 2^-t r^G (box volume 2^-t r^G = r^G vol-ratio-wise)."""
    if r < 2 or G < 1:
        raise DomainError("need r >= 2 and G >= 1")
    return iv.sqrt(iv.mpf(r ** G) / (2 ** K.t))


def minkowski_target(r: int, G: int, abs_disc: int) -> int:
    """ceil(r^G / sqrt(abs_disc)) exactly, in integers."""
    A = r ** (2 * G)
    t = math.isqrt(A // abs_disc)
    while t * t * abs_disc < A:
        t += 1
    return t


def _tau_from_cell(E: LatticeEmbedding, i, j, g: int, bumps: int):
    si = Fraction(i, g) + _GRID_OFFSET
    sj = Fraction(j, g) + _GRID_OFFSET
    shift = enc.enc(_BUMP * bumps) if bumps else 0
    t1 = E.b00 * enc.enc(si) + E.b01 * enc.enc(sj) + shift
    t2 = E.b10 * enc.enc(si) + E.b11 * enc.enc(sj) + shift
    return t1, t2


def _float_count(bf, tau1: float, tau2: float, rho: float, pad: float = 0.0) -> int:
    """Approximate open-box lattice count (float arithmetic, numpy over u)."""
    b00, b01, b10, b11 = bf
    det = b00 * b11 - b01 * b10
    corners_u = []
    for x0 in (tau1, tau1 + rho):
        for x1 in (tau2, tau2 + rho):
            corners_u.append((b11 * x0 - b01 * x1) / det)
    u_lo = math.floor(min(corners_u)) - 1
    u_hi = math.ceil(max(corners_u)) + 1
    if u_hi - u_lo > 4 * 10 ** 6:
        raise CapacityError("u-range %d too large" % (u_hi - u_lo))
    u = np.arange(u_lo, u_hi + 1, dtype=np.float64)
    vlo = np.full_like(u, -np.inf)
    vhi = np.full_like(u, np.inf)
    alive = np.ones(len(u), dtype=bool)
    for (bu, bv, lo) in ((b00, b01, tau1), (b10, b11, tau2)):
        a = bu * u
        hi = lo + rho
        if abs(bv) < 1e-300:
            alive &= (a > lo - pad) & (a < hi + pad)
        else:
            w1 = (lo - pad - a) / bv
            w2 = (hi + pad - a) / bv
            lo_v = np.minimum(w1, w2)
            hi_v = np.maximum(w1, w2)
            vlo = np.maximum(vlo, lo_v)
            vhi = np.minimum(vhi, hi_v)
    # the basis is invertible, so at least one coordinate bounds v
    counts = np.floor(vhi - 1e-12) - np.ceil(vlo + 1e-12) + 1
    counts = np.where(alive & np.isfinite(vlo) & np.isfinite(vhi),
                      np.maximum(counts, 0), 0)
    return int(counts.sum())


def _candidate_points(bf, tau1: float, tau2: float, rho: float):
    """Superset of box members: float ranges padded generously."""
    b00, b01, b10, b11 = bf
    det = b00 * b11 - b01 * b10
    scale = abs(tau1) + abs(tau2) + rho + 1.0
    pad = 1e-9 * scale + 1e-9
    corners_u = []
    for x0 in (tau1, tau1 + rho):
        for x1 in (tau2, tau2 + rho):
            corners_u.append((b11 * x0 - b01 * x1) / det)
    u_lo = math.floor(min(corners_u)) - 2
    u_hi = math.ceil(max(corners_u)) + 2
    for u in range(u_lo, u_hi + 1):
        vlo, vhi = -math.inf, math.inf
        ok = True
        for (bu, bv, lo) in ((b00, b01, tau1), (b10, b11, tau2)):
            a = bu * u
            hi = lo + rho
            if abs(bv) < 1e-300:
                if not (lo - pad < a < hi + pad):
                    ok = False
                    break
            else:
                w1 = (lo - pad - a) / bv
                w2 = (hi + pad - a) / bv
                vlo = max(vlo, min(w1, w2))
                vhi = min(vhi, max(w1, w2))
        if not ok or vlo > vhi:
            continue
        for v in range(math.ceil(vlo) - 1, math.floor(vhi) + 2):
            yield (u, v)


def _classify(E: LatticeEmbedding, box_tau1, box_tau2, rho, u: int, v: int) -> bool:
    """True if strictly inside, False if strictly outside; else BoundaryContact."""
    x0 = E.b00 * u + E.b01 * v
    x1 = E.b10 * u + E.b11 * v
    for x, lo in ((x0, box_tau1), (x1, box_tau2)):
        left = x - lo          # must be > 0
        right = lo + rho - x   # must be > 0
        l_lo, l_hi = mpmath.mpf(left.a), mpmath.mpf(left.b)
        r_lo, r_hi = mpmath.mpf(right.a), mpmath.mpf(right.b)
        if l_hi <= 0 or r_hi <= 0:
            return False
        if l_lo <= 0 or r_lo <= 0:
            raise BoundaryContact("lattice point (%d, %d) touches a box face" % (u, v))
    return True


def _exact_points(E: LatticeEmbedding, tau1, tau2, rho) -> list:
    bf = E.floats
    t1f, t2f = float(enc.midpoint(tau1)), float(enc.midpoint(tau2))
    rf = float(enc.midpoint(rho))
    pts = []
    for (u, v) in _candidate_points(bf, t1f, t2f, rf):
        if _classify(E, tau1, tau2, rho, u, v):
            pts.append((u, v))
    pts.sort()
    return pts


def find_tau(E: LatticeEmbedding, r: int, G: int, start_grid: int = 64,
             max_grid: int = 1024, seed=None) -> BoxSpec:
    """Certified translate: the open box holds >= ceil(r^G/sqrt|disc|) points.

    Deterministic: grid translates of the basis cell are scored in floats,
    the best few are re-counted exactly in interval arithmetic, and ties go
    to the lexicographically smallest grid cell. Boundary contacts nudge the
    translate by 2^-40 per attempt. Exhausting every grid up to max_grid
    raises TauSearchError (retry with a larger max_grid); an under-counted
    box is never returned.
    """
    K = E.field
    target = minkowski_target(r, G, abs(K.disc))
    if r ** G > OMEGA_CAP * math.isqrt(abs(K.disc)) + OMEGA_CAP:
        raise CapacityError("expected point count exceeds cap %d" % OMEGA_CAP)
    rho = box_side(K, r, G)
    rho_f = float(enc.midpoint(rho))
    bf = E.floats
    g = start_grid
    while g <= max_grid:
        scored = []
        for i in range(g):
            si = i / g + float(_GRID_OFFSET)
            for j in range(g):
                sj = j / g + float(_GRID_OFFSET)
                t1 = bf[0] * si + bf[1] * sj
                t2 = bf[2] * si + bf[3] * sj
                scored.append((-_float_count(bf, t1, t2, rho_f), i, j))
        scored.sort()
        best = None
        for (negscore, i, j) in scored[:6]:
            if -negscore < target and best is not None:
                break
            for bumps in range(8):
                t1, t2 = _tau_from_cell(E, i, j, g, bumps)
                try:
                    pts = _exact_points(E, t1, t2, rho)
                except BoundaryContact:
                    continue
                if best is None or len(pts) > best[0]:
                    best = (len(pts), i, j, bumps)
                break
        # centered fallback covers sparse boxes the coarse grid misses
        for bumps in range(8):
            t1 = -rho / 2 + enc.enc(_BUMP * bumps)
            t2 = -rho / 2 + enc.enc(_BUMP * bumps)
            try:
                pts = _exact_points(E, t1, t2, rho)
            except BoundaryContact:
                continue
            if best is None or len(pts) > best[0]:
                best = (len(pts), -1, -1, bumps)
            break
        if best is not None and best[0] >= target:
            count, i, j, bumps = best
            if (i, j) == (-1, -1):
                t1 = -rho / 2 + enc.enc(_BUMP * bumps)
                t2 = -rho / 2 + enc.enc(_BUMP * bumps)
            else:
                t1, t2 = _tau_from_cell(E, i, j, g, bumps)
            return BoxSpec(rho=rho, tau1=t1, tau2=t2, r=r, G=G,
                           grid=g, cell=(i, j), bumps=bumps)
        g *= 2
    raise TauSearchError(
        "no translate certified %d points up to grid %d; retry with a finer grid"
        % (target, max_grid))


def enumerate_omega(E: LatticeEmbedding, box: BoxSpec) -> list:
    """Exact sorted list of lattice (u, v) strictly inside the box."""
    return _exact_points(E, box.tau1, box.tau2, box.rho)


def residue_symbol(a, P: PrimeIdealRecord, q: int) -> int:
    """Reduce a = (u, v) = u + v*omega modulo P; value in [0, N(P)) < q+1.

    Split and ramified ideals reduce through omega -> residue_root in F_p;
    inert ideals keep both coordinates, packed as (u mod p)*p + (v mod p).
    """
    if P.norm > q:
        raise DomainError("ideal norm %d exceeds alphabet bound q=%d" % (P.norm, q))
    u, v = a
    if P.split_type == INERT:
        return (u % P.p) * P.p + (v % P.p)
    return (u + v * P.residue_root) % P.p


def build_code(K: QuadraticField, r: int, q: int, G: int,
               start_grid: int = 64, max_grid: int = 1024, seed=None) -> LenstraCode:
    """Construct the length-n code over [0, q) from the field K.

    Requires 2 <= r <= q, 1 <= G <= n where n is the number of prime ideals
    with norm in [r, q], and r^(2G) >= |disc| so the box out-volumes the
    lattice cell.
    """
    if not 2 <= r <= q:
        raise DomainError("need 2 <= r <= q, got r=%r q=%r" % (r, q))
    if G < 1:
        raise DomainError("need G >= 1")
    ideals = prime_ideals_in_norm_range(K, r, q)
    n = len(ideals)
    if n < 1:
        raise DomainError("no prime ideals with norm in [%d, %d]" % (r, q))
    if G > n:
        raise DomainError("G=%d exceeds the number of ideals n=%d" % (G, n))
    if r ** (2 * G) < abs(K.disc):
        raise DomainError(
            "box volume too small: r^(2G)=%d < |disc|=%d" % (r ** (2 * G), abs(K.disc)))
    E = make_embedding(K)
    box = find_tau(E, r, G, start_grid=start_grid, max_grid=max_grid, seed=seed)
    omega = enumerate_omega(E, box)
    if len(omega) > OMEGA_CAP:
        raise CapacityError("omega size %d exceeds cap %d" % (len(omega), OMEGA_CAP))
    words = tuple(tuple(residue_symbol(a, P, q) for P in ideals) for a in omega)
    return LenstraCode(disc=K.disc, q=q, r=r, G=G, n=n,
                       tau=(float(enc.midpoint(box.tau1)),
                            float(enc.midpoint(box.tau2))),
                       ideals=tuple(ideals), omega=tuple(omega), codewords=words)


def format_code_file(code: LenstraCode) -> str:
    """Text form: one header line, then one codeword per line."""
    head = "# lenstra q=%d r=%d G=%d disc=%d n=%d tau=%r,%r" % (
        code.q, code.r, code.G, code.disc, code.n, code.tau[0], code.tau[1])
    lines = [head]
    lines.extend(" ".join(str(s) for s in w) for w in code.codewords)
    return "\n".join(lines) + "\n"


def write_code_file(code: LenstraCode, path) -> None:
    with open(path, "w") as fp:
        fp.write(format_code_file(code))


def parse_code_file(text: str) -> LenstraCode:
    """Inverse of format_code_file; ideals and omega are not serialized.

    Malformed structure raises DomainError with the offending line number.
    """
    lines = text.splitlines()
    if not lines or not lines[0].startswith("# lenstra "):
        raise DomainError("line 1: missing '# lenstra' header")
    fields = {}
    for tok in lines[0][len("# lenstra "):].split():
        if "=" not in tok:
            raise DomainError("line 1: bad header token %r" % tok)
        key, val = tok.split("=", 1)
        fields[key] = val
    try:
        q = int(fields["q"])
        r = int(fields["r"])
        G = int(fields["G"])
        disc = int(fields["disc"])
        n = int(fields["n"])
        tau = tuple(float(t) for t in fields["tau"].split(","))
    except (KeyError, ValueError) as e:
        raise DomainError("line 1: bad header (%s)" % e) from None
    if len(tau) != 2:
        raise DomainError("line 1: tau must have two coordinates")
    words = []
    for idx, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            word = tuple(int(t) for t in line.split())
        except ValueError:
            raise DomainError("line %d: non-integer symbol" % idx) from None
        if len(word) != n:
            raise DomainError("line %d: expected %d symbols, got %d"
                              % (idx, n, len(word)))
        words.append(word)
    return LenstraCode(disc=disc, q=q, r=r, G=G, n=n, tau=tau,
                       ideals=(), omega=(), codewords=tuple(words))


def read_code_file(path) -> LenstraCode:
    with open(path) as fp:
        return parse_code_file(fp.read())


def _distance_scan(arr: np.ndarray, threads: int = 1):
    """Exact min Hamming distance and an argmin pair over all row pairs."""
    m, n = arr.shape
    block = max(1, min(512, (1 << 22) // max(1, m * n)))
    best = (n + 1, None)

    def scan(lo):
        hi = min(lo + block, m - 1)
        local = (n + 1, None)
        for i in range(lo, hi):
            diffs = (arr[i + 1:] != arr[i]).sum(axis=1)
            j = int(np.argmin(diffs))
            d = int(diffs[j])
            if d < local[0]:
                local = (d, (i, i + 1 + j))
        return local

    starts = list(range(0, m - 1, block))
    if threads and threads > 1 and len(starts) > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(scan, starts))
    else:
        results = [scan(lo) for lo in starts]
    for d, pair in results:
        if d < best[0] or (d == best[0] and best[1] is None):
            best = (d, pair)
        elif d == best[0] and pair is not None and best[1] is not None:
            best = (d, min(best[1], pair))
    return best


def verify_code(code: LenstraCode, threads: int = 1) -> CodeCheck:
    """Exact verification: distinct count, min distance, and the two bounds.

    ok requires M >= ceil(r^G/sqrt|disc|), an injective word map, and
    d >= n + 1 - G (skipped when M < 2; a single word has d = n by
    convention).
    """
    words = code.codewords
    total = len(words)
    if total > PAIRWISE_CAP:
        raise CapacityError("M=%d exceeds pairwise cap %d" % (total, PAIRWISE_CAP))
    M = len(set(words))
    injective = (M == total)
    target = minkowski_target(code.r, code.G, abs(code.disc))
    if total < 2:
        d = code.n
        ok = injective and M >= target
        return CodeCheck(M=M, d=d, ok=ok, injective=injective,
                         min_target=target, worst_pair=None)
    dtype = np.uint8 if code.q <= 255 else np.int64
    try:
        arr = np.asarray(words, dtype=dtype)
    except (OverflowError, ValueError):
        # corrupted inputs may carry symbols outside [0, q)
        arr = np.asarray(words, dtype=np.int64)
    d, pair = _distance_scan(arr, threads=threads)
    ok = injective and M >= target and d >= code.n + 1 - code.G
    return CodeCheck(M=M, d=d, ok=ok, injective=injective,
                     min_target=target, worst_pair=pair)


def norm_gap_check(code: LenstraCode) -> bool:
    """For every pair a != b in omega: r^(agree) <= |N(a-b)| < r^G.

    agree counts coordinates where the words coincide. Exact integer
    arithmetic throughout (numpy int64 blocks; sizes are guarded).
    """
    omega = code.omega
    m = len(omega)
    if m < 2:
        return True
    if m > PAIRWISE_CAP:
        raise CapacityError("M=%d exceeds pairwise cap %d" % (m, PAIRWISE_CAP))
    K_T = 0 if code.disc % 4 == 0 else 1
    K_N = -(code.disc // 4) if code.disc % 4 == 0 else (1 - code.disc) // 4
    r, G, n = code.r, code.G, code.n
    if r ** G > 1 << 60:
        raise CapacityError("r^G too large for vectorized norm scan")
    powers = np.array([r ** e for e in range(n + 1)], dtype=np.int64)
    uv = np.asarray(omega, dtype=np.int64)
    arr = np.asarray(code.codewords, dtype=np.int64)
    upper = r ** G
    block = max(1, min(512, (1 << 22) // max(1, m)))
    for lo in range(0, m - 1, block):
        hi = min(lo + block, m - 1)
        for i in range(lo, hi):
            du = uv[i + 1:, 0] - uv[i, 0]
            dv = uv[i + 1:, 1] - uv[i, 1]
            norms = np.abs(du * du + K_T * du * dv + K_N * dv * dv)
            agree = (arr[i + 1:] == arr[i]).sum(axis=1)
            if int(agree.max(initial=0)) >= len(powers):
                return False
            lower = powers[agree]
            if not bool(np.all((norms >= lower) & (norms < upper))):
                return False
    return True
