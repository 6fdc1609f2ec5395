"""Bulk range sweeps: sieved discriminant tables, batch class numbers, and
materialized (D, N, H) triple lists that the scans and the CLI consume.

The per-discriminant routines in `classnum` are the reference semantics; the
batch routines here must agree with them bit for bit (the test suite checks
this) and exist only to make full-range scans fast.  Sweeps over a range may
be sharded across worker processes; chunk boundaries never change results.
"""

from __future__ import annotations

import math
import multiprocessing
import os
import time
from fractions import Fraction

import numpy as np

from . import arith, classnum
from .discriminants import IMAGINARY, REAL
from .maxima import FieldRecord, ScanRecord
from .metric import EPS_ZERO, Epsilon, c_eps

# ---------------------------------------------------------------------------
# sieved tables
# ---------------------------------------------------------------------------


def omega_table(limit: int) -> np.ndarray:
    """omega(n) for 0 <= n <= limit (omega(0) = omega(1) = 0)."""
    om = np.zeros(limit + 1, dtype=np.uint8)
    for p in arith.primes_upto(limit):
        om[p::p] += 1
    return om


def squarefree_mask(limit: int) -> np.ndarray:
    sq = np.ones(limit + 1, dtype=bool)
    sq[0] = False
    for p in arith.primes_upto(math.isqrt(limit)):
        sq[p * p :: p * p] = False
    return sq


def fundamental_mask(limit: int, signature: str) -> np.ndarray:
    """mask[D] for 2 <= D <= limit: is +-D a fundamental discriminant.

    Must match discriminants.is_fundamental value for value = -D (imaginary)
    or +D (real); the suite asserts bit-identical agreement.
    """
    sq = squarefree_mask(limit)
    n = np.arange(limit + 1, dtype=np.int64)
    mask = np.zeros(limit + 1, dtype=bool)
    odd_res = 3 if signature == IMAGINARY else 1
    mask |= ((n & 3) == odd_res) & sq
    div4 = (n & 3) == 0
    m = n >> 2
    m_res = np.zeros(limit + 1, dtype=bool)
    if signature == IMAGINARY:
        wanted = ((m & 3) == 1) | ((m & 3) == 2)
    else:
        wanted = ((m & 3) == 3) | ((m & 3) == 2)
    m_res[div4] = wanted[div4] & sq[m[div4]]
    mask |= m_res
    mask[:3] = False
    return mask


def imag_class_table(limit: int) -> np.ndarray:
    """H(-D) for all fundamental 3 <= D <= limit, by a form-count sieve.

    Counts reduced positive-definite forms (0 <= b <= a <= c with weight 2,
    minus the b = 0, b = a and a = c boundary overcounts) for every D at
    once; entries at non-fundamental indices are unnormalized raw counts and
    must not be read.
    """
    counts = np.zeros(limit + 1, dtype=np.int32)
    amax = math.isqrt(limit // 3)
    for a in range(1, amax + 1):
        step = 4 * a
        base = 4 * a * a
        for b in range(0, a + 1):
            start = base - b * b
            if start <= limit:
                counts[start::step] += 2
        counts[base::step] -= 1  # b = 0 forms counted once
        counts[base - a * a :: step] -= 1  # b = a forms counted once
        if a > 1:
            ds = base - np.arange(1, a, dtype=np.int64) ** 2  # a = c, 0 < b < a
            ds = ds[ds <= limit]
            np.add.at(counts, ds, -1)
    return counts


# ---------------------------------------------------------------------------
# divisor table (CSR) for the real-case window enumeration
# ---------------------------------------------------------------------------


def divisor_table(limit: int) -> tuple[np.ndarray, np.ndarray]:
    """(indptr, data): divisors of m are data[indptr[m]:indptr[m+1]], ascending."""
    dcount = np.zeros(limit + 1, dtype=np.int32)
    for a in range(1, limit + 1):
        dcount[a::a] += 1
    indptr = np.zeros(limit + 2, dtype=np.int64)
    np.cumsum(dcount, out=indptr[1:])
    data = np.empty(int(indptr[-1]), dtype=np.int32)
    offs = indptr[:-1].copy()
    for a in range(1, limit + 1):
        idx = offs[a::a]
        data[idx] = a
        offs[a::a] += 1
    return indptr, data


def reduced_form_pairs(
    d: int, indptr: np.ndarray, ddata: np.ndarray
) -> tuple[list[int], list[int]]:
    """(a, b) with a > 0 for the reduced indefinite forms of fundamental d > 0;
    each pair stands for the sign class pair (a, b, c) and (-a, b, -c)."""
    s = math.isqrt(d)
    b0 = 2 - (d & 1)
    bs = np.arange(b0, s + 1, 2, dtype=np.int64)
    ms = (d - bs * bs) >> 2
    starts = indptr[ms]
    cnts = (indptr[ms + 1] - starts).astype(np.int64)
    total = int(cnts.sum())
    if total == 0:
        return [], []
    pos = np.arange(total, dtype=np.int64)
    seg = np.repeat(np.cumsum(cnts) - cnts, cnts)
    gather = np.repeat(starts, cnts) + (pos - seg)
    gs = ddata[gather].astype(np.int64)
    brep = np.repeat(bs, cnts)
    t1 = 2 * gs + brep
    t2 = 2 * gs - brep
    keep = (t1 * t1 > d) & ((t2 < 0) | (t2 * t2 < d))
    return gs[keep].tolist(), brep[keep].tolist()


def _narrow_from_tables(d: int, indptr: np.ndarray, ddata: np.ndarray) -> int:
    """Narrow class number of fundamental d > 0 using the divisor table.

    Same reduced-form set and rho walk as classnum.narrow_class_number_real;
    primitivity is automatic for fundamental discriminants.
    """
    a_list, b_list = reduced_form_pairs(d, indptr, ddata)
    if not a_list:
        return 0
    s = math.isqrt(d)
    # integer-keyed form set over both sign classes
    stride = 2 * s + 2
    pending = set()
    for a, b in zip(a_list, b_list):
        pending.add((a + s) * stride + b)
        pending.add((s - a) * stride + b)
    max_steps = len(pending) + 1
    cycles = 0
    while pending:
        start_key = next(iter(pending))
        pending.discard(start_key)
        a = start_key // stride - s
        b = start_key % stride
        steps = 0
        key = None
        while key != start_key:
            c = (b * b - d) // (4 * a)
            ac = -c if c < 0 else c
            w = s - 2 * ac + 1
            b = w + (-b - w) % (2 * ac)
            a = c
            steps += 1
            if steps > max_steps:
                raise ArithmeticError(f"rho walk escaped the reduced set at d = {d}")
            key = (a + s) * stride + b
            if key != start_key:
                pending.discard(key)
        if steps & 1:
            raise ArithmeticError(f"odd rho cycle length at d = {d}")
        cycles += 1
    return cycles


# worker globals (populated before fork, shared copy-on-write)
_W: dict = {}


def _init_real_tables(limit: int) -> None:
    _W["indptr"], _W["ddata"] = divisor_table(limit // 4 + 1)
    _W["fund"] = fundamental_mask(limit, REAL)
    _W["omega"] = omega_table(limit)


def _narrow_chunk(bounds: tuple[int, int]) -> list[tuple[int, int, int]]:
    lo, hi = bounds
    fund = _W["fund"]
    om = _W["omega"]
    indptr = _W["indptr"]
    ddata = _W["ddata"]
    out = []
    for d in np.nonzero(fund[lo : hi + 1])[0]:
        dd = int(d) + lo
        out.append((dd, int(om[dd]), _narrow_from_tables(dd, indptr, ddata)))
    return out


def quad_triples(
    signature: str, lo: int, hi: int, workers: int = 1
) -> list[tuple[int, int, int]]:
    """Materialized (D, N, H) for every fundamental |D| in [lo, hi], ascending.

    H is the ordinary class number for imaginary fields and the narrow class
    number for real fields, exactly as the per-discriminant routines compute.
    """
    if not 1 <= lo <= hi:
        raise ValueError("need 1 <= lo <= hi")
    if signature == IMAGINARY:
        mask = fundamental_mask(hi, IMAGINARY)
        om = omega_table(hi)
        table = imag_class_table(hi)
        ds = np.nonzero(mask[lo : hi + 1])[0] + lo
        return list(zip(ds.tolist(), om[ds].tolist(), table[ds].tolist()))
    if signature != REAL:
        raise ValueError(f"unknown signature {signature!r}")
    _init_real_tables(hi)
    try:
        if workers <= 1:
            return _narrow_chunk((max(lo, 2), hi))
        chunk_edges = np.linspace(max(lo, 2), hi + 1, workers * 8 + 1, dtype=np.int64)
        chunks = [
            (int(chunk_edges[i]), int(chunk_edges[i + 1]) - 1)
            for i in range(len(chunk_edges) - 1)
            if chunk_edges[i] <= chunk_edges[i + 1] - 1
        ]
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(workers) as pool:
            parts = pool.map(_narrow_chunk, chunks)
        out: list[tuple[int, int, int]] = []
        for part in parts:
            out.extend(part)
        return out
    finally:
        _W.clear()


# ---------------------------------------------------------------------------
# record materialization for the maxima engine
# ---------------------------------------------------------------------------

NONGENUS = "nongenus"
FULL = "full"
RAW_H = "raw_H"
RAW_SMALL_H = "raw_h"

QUAD_METRICS = (NONGENUS, FULL, RAW_H, RAW_SMALL_H)


def quad_records(
    triples: list[tuple[int, int, int]],
    signature: str,
    eps: Epsilon,
    metric_kind: str,
) -> list[ScanRecord]:
    """Turn (D, N, H) triples into scan records under one metric."""
    if metric_kind not in QUAD_METRICS:
        raise ValueError(f"unknown metric {metric_kind!r}")
    sign = -1 if signature == IMAGINARY else 1
    out = []
    for d, n, big_h in triples:
        g = 1 << (n - 1)
        if big_h % g:
            raise ArithmeticError(f"genus number 2^{n - 1} does not divide H at D = {d}")
        small_h = big_h // g
        if metric_kind == NONGENUS:
            value = c_eps(small_h, d, eps)
        elif metric_kind == FULL:
            value = c_eps(big_h, d, eps)
        elif metric_kind == RAW_H:
            value = c_eps(big_h, d, EPS_ZERO)
        else:
            value = c_eps(small_h, d, EPS_ZERO)
        payload = FieldRecord(
            f=d,
            d_signed=sign * d,
            signature=signature,
            n_ramified=n,
            n_fields=1,
            H=big_h,
            h=small_h,
        )
        out.append(ScanRecord(key=d, payload=payload, value=value))
    return out


# ---------------------------------------------------------------------------
# prime-product genus families
# ---------------------------------------------------------------------------


def attached_imaginary_discriminant(m: int) -> int:
    """Fundamental discriminant of Q(sqrt(-m)) for squarefree m > 1."""
    return -m if (-m) % 4 == 1 else -4 * m


def genus_family_rows(
    primes: list[int],
    eps: Epsilon,
    budget_seconds: float | None = None,
) -> tuple[list[dict], bool]:
    """(D, H, h, N, C) for the prefix products of the given primes.

    Rows are produced in prefix order; if a row's class-number computation
    would start after the time budget is exhausted, the remaining rows are
    skipped and the flag comes back True.
    """
    if len(set(primes)) != len(primes) or not primes:
        raise ValueError("need a nonempty list of distinct primes")
    for p in primes:
        if not arith.is_prime(p):
            raise ValueError(f"{p} is not prime")
    rows: list[dict] = []
    started = time.monotonic()
    m = 1
    for i, p in enumerate(primes):
        m *= p
        if m.bit_length() > 63:
            raise ValueError("prefix product exceeds the 63-bit input bound")
        if budget_seconds is not None and time.monotonic() - started > budget_seconds:
            return rows, True
        d = attached_imaginary_discriminant(m)
        big_h = classnum.class_number_imaginary(d)
        n = arith.omega(-d)
        g = 1 << (n - 1)
        small_h = big_h // g
        value = c_eps(small_h, -d, eps)
        rows.append(
            {
                "primes": primes[: i + 1],
                "D": d,
                "H": big_h,
                "h": small_h,
                "N": n,
                "value": value,
            }
        )
    return rows, False


# ---------------------------------------------------------------------------
# epsilon threshold search
# ---------------------------------------------------------------------------


def count_events(
    triples: list[tuple[int, int, int]],
    signature: str,
    eps: Epsilon,
    metric_kind: str,
    mode: str = "maxima",
    stop_after: int | None = None,
) -> int:
    """Number of successive-record events for one eps (cheap rescan)."""
    from .maxima import BucketSpec, scan

    records = quad_records(triples, signature, eps, metric_kind)
    count = 0
    for _ in scan(iter(records), mode, BucketSpec(1)):
        count += 1
        if stop_after is not None and count >= stop_after:
            break
    return count


def threshold_search(
    triples: list[tuple[int, int, int]],
    signature: str,
    grid_step: Fraction,
    metric_kind: str = NONGENUS,
) -> Fraction | None:
    """Largest grid multiple of grid_step (< 2) with >= 2 maxima events.

    Taken by bisection over the grid, assuming the event count is monotone
    nonincreasing in eps (true in practice for these streams); the endpoint
    is verified before returning.  None means even eps = 0 has < 2 events.
    """
    if grid_step <= 0:
        raise ValueError("grid step must be positive")

    def plenty(k: int) -> bool:
        eps = Epsilon.of(grid_step * k)
        return count_events(triples, signature, eps, metric_kind, stop_after=2) >= 2

    k_hi = int(Fraction(2) / grid_step)
    while grid_step * k_hi >= 2:
        k_hi -= 1
    if not plenty(0):
        return None
    lo, hi = 0, k_hi
    if plenty(k_hi):
        return grid_step * k_hi
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if plenty(mid):
            lo = mid
        else:
            hi = mid
    if not plenty(lo) or (lo + 1 <= k_hi and plenty(lo + 1)):
        raise ArithmeticError("event count not monotone on the grid")
    return grid_step * lo
