"""Evaluation of the log-characteristic-polynomial field on points and meshes.

The real field at t is sum_ell c_ell * log|1 - e(ell t)| with
log|1 - e(u)| = log(2 |sin pi u|); the imaginary field replaces the log
term by the principal branch arg(1 - e(u)) = pi (u - 1/2). Field values
live in [-inf, inf) and are represented as IEEE floats: -inf is an exact
state that absorbs addition and compares below every finite value.

On rational points and rotated rational meshes the reduction ell*t mod 1
is carried out in exact integer arithmetic, so the singularity ell*t in Z
(value -inf, real kind) is decided exactly, never by floating-point
underflow. Mesh scans run the reduction in blocked int64 numpy kernels.
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .errors import CapacityError, InvalidArgumentError

__all__ = [
    "NEG_INF",
    "Mesh",
    "FieldSpec",
    "ScanResult",
    "log_abs_term",
    "arg_term",
    "log_abs_term_array",
    "eval_point",
    "split_field",
    "scan_max",
    "resolve_threads",
    "write_trace_csv",
]

NEG_INF = float("-inf")

FLOAT_ZERO_TOL = 1e-15  # torus distance below which float input counts as 0
BLOCK = 1 << 16  # mesh points per scan task
INT128_LIMIT = 1 << 127
INT64_SAFE = 1 << 62


@dataclass
class Mesh:
    """Rotated rational grid {j/q + theta/q^2 : 0 <= j < q}, theta = num/den."""

    q: int
    theta_num: int = 0
    theta_den: int = 1

    def __post_init__(self):
        if self.q < 1:
            raise InvalidArgumentError(f"mesh size q must be >= 1, got {self.q}")
        if self.theta_den < 1:
            raise InvalidArgumentError("theta_den must be >= 1")
        if abs(self.theta_num) > self.theta_den:
            raise InvalidArgumentError("rotation theta must satisfy |theta| <= 1")

    def point(self, j):
        """Exact rational value of mesh point j."""
        return Fraction(
            j * self.q * self.theta_den + self.theta_num,
            self.q * self.q * self.theta_den,
        )

    def point_float(self, j):
        return (j * self.q * self.theta_den + self.theta_num) / (
            self.q * self.q * self.theta_den
        )

    def points_float(self):
        d = self.q * self.q * self.theta_den
        if d >= INT64_SAFE:
            raise CapacityError(f"q^2 * theta_den = {d} exceeds the int64-safe range")
        j = np.arange(self.q, dtype=np.int64)
        return (j * (self.q * self.theta_den) + self.theta_num) / d


@dataclass
class FieldSpec:
    """Which field to evaluate: counts, real or imaginary kind, optional cutoff."""

    counts: object  # CycleStructure or PoissonCounts
    kind: str = "real"
    truncation: Optional[int] = None

    def __post_init__(self):
        if self.kind not in ("real", "imag"):
            raise InvalidArgumentError(f"kind must be real|imag, got {self.kind}")
        if self.truncation is not None and not 1 <= self.truncation <= self.counts.size:
            raise InvalidArgumentError(
                f"truncation {self.truncation} outside [1, {self.counts.size}]"
            )


@dataclass
class ScanResult:
    index: int
    value: float
    trace: Optional[np.ndarray] = None


def log_abs_term(u, exact_zero=None):
    """log|1 - e(u)| = log(2 |sin pi u|); -inf exactly at u == 0 mod 1.

    exact_zero selects how the singularity is detected: None dispatches on
    the input type (exact for Fraction/int, threshold ||u|| < 1e-15 for
    float), True forces the exact test, False forces the threshold.
    """
    if exact_zero is None:
        exact_zero = isinstance(u, (Fraction, int))
    if isinstance(u, Fraction):
        frac = u - math.floor(u)
        if exact_zero:
            if frac == 0:
                return NEG_INF
        elif min(frac, 1 - frac) < FLOAT_ZERO_TOL:
            return NEG_INF
        w = float(min(frac, 1 - frac))
    else:
        frac = float(u) % 1.0
        w = min(frac, 1.0 - frac)
        if exact_zero:
            if w == 0.0:
                return NEG_INF
        elif w < FLOAT_ZERO_TOL:
            return NEG_INF
    return math.log(2.0 * math.sin(math.pi * w))


def arg_term(u):
    """Principal branch arg(1 - e(u)) = pi (u - 1/2), u reduced to [0, 1)."""
    if isinstance(u, Fraction):
        u = float(u - math.floor(u))
    else:
        u = float(u) % 1.0
    return math.pi * (u - 0.5)


def log_abs_term_array(lengths, t):
    """Vectorized log|1 - e(ell t)| over an int64 array of lengths, float t."""
    u = np.mod(np.asarray(lengths, dtype=np.float64) * t, 1.0)
    w = np.minimum(u, 1.0 - u)
    with np.errstate(divide="ignore"):
        return np.log(2.0 * np.sin(np.pi * w))


def _as_fraction(t):
    """Exact rational form of a torus point and whether it arrived exact."""
    if isinstance(t, Fraction):
        return t, True
    if isinstance(t, int):
        return Fraction(t), True
    # floats are dyadic rationals; reduce them exactly
    return Fraction(*float(t).as_integer_ratio()), False


def _term_from_residue(num, den, kind, exact):
    if kind == "imag":
        return math.pi * (num / den - 0.5)
    num = min(num, den - num)
    if exact:
        if num == 0:
            return NEG_INF
    elif num / den < FLOAT_ZERO_TOL:
        return NEG_INF
    return math.log(2.0 * math.sin(math.pi * (num / den)))


def eval_point(spec, t):
    """Field value sum_ell c_ell * term(ell t mod 1) at a single point.

    The reduction ell*t mod 1 is exact integer arithmetic on the rational
    form of t. Real kind returns -inf iff some occupied length has
    ell*t in Z (threshold rule for float inputs); imaginary kind is finite.
    """
    frac_t, exact = _as_fraction(t)
    p, d = frac_t.numerator, frac_t.denominator
    lengths, counts = spec.counts.as_arrays()
    if spec.truncation is not None:
        keep = lengths <= spec.truncation
        lengths, counts = lengths[keep], counts[keep]
    total = 0.0
    for ell, c in zip(lengths.tolist(), counts.tolist()):
        if d * ell >= INT128_LIMIT:
            raise CapacityError(
                f"reduction ell * denominator = {ell} * {d} exceeds the "
                "128-bit range supported for exact rational evaluation"
            )
        num = (ell * p) % d
        total += c * _term_from_residue(num, d, spec.kind, exact)
        if total == NEG_INF:
            return NEG_INF
    return total


def split_field(spec, w, t):
    """(low, high) parts of the field split at length n/W; low + high = total."""
    n = spec.counts.size
    if not 2 <= w <= n:
        raise InvalidArgumentError(f"W must lie in [2, {n}], got {w}")
    cutoff = n // w  # >= 1 since w <= n
    low = eval_point(
        FieldSpec(counts=spec.counts, kind=spec.kind, truncation=cutoff), t
    )
    # high part: lengths above the cutoff
    frac_t, exact = _as_fraction(t)
    p, d = frac_t.numerator, frac_t.denominator
    lengths, counts = spec.counts.as_arrays()
    high = 0.0
    for ell, c in zip(lengths.tolist(), counts.tolist()):
        if ell <= cutoff:
            continue
        if d * ell >= INT128_LIMIT:
            raise CapacityError(
                f"reduction ell * denominator = {ell} * {d} exceeds the "
                "128-bit range supported for exact rational evaluation"
            )
        num = (ell * p) % d
        high += c * _term_from_residue(num, d, spec.kind, exact)
        if high == NEG_INF:
            break
    return low, high


def resolve_threads(threads=None):
    if threads:
        return max(1, int(threads))
    env = os.environ.get("PERMFIELD_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _scan_capacity_check(mesh, max_len):
    q, td, tn = mesh.q, mesh.theta_den, mesh.theta_num
    d = q * q * td
    if d >= INT64_SAFE:
        raise CapacityError(
            f"mesh denominator q^2 * theta_den = {d} exceeds the int64-safe "
            "range of the scan kernel"
        )
    if max_len * abs(tn) >= INT64_SAFE:
        raise CapacityError(
            f"max length * |theta_num| = {max_len * abs(tn)} exceeds the "
            "int64-safe range of the scan kernel"
        )


def _scan_block(j0, j1, q, qtd, d, residues, offsets, counts, imag):
    j = np.arange(j0, j1, dtype=np.int64)
    acc = np.zeros(j1 - j0)
    for r, off, c in zip(residues, offsets, counts):
        num = ((r * j) % q) * qtd + off
        num %= d
        if imag:
            acc += c * (np.pi * (num / d - 0.5))
        else:
            fold = np.minimum(num, d - num)
            with np.errstate(divide="ignore"):
                acc += c * np.log(2.0 * np.sin(np.pi * (fold / d)))
    return acc


def scan_max(spec, mesh, threads=None, want_trace=False):
    """Exact maximizer of the field over all mesh points.

    Deterministic parallel reduction over contiguous blocks of 2^16
    points; the result (and optional trace) is bit-identical for every
    thread count. Ties, including the all--inf mesh, resolve to the
    smallest index. Cost O(q * #distinct lengths).
    """
    lengths, counts = spec.counts.as_arrays()
    if spec.truncation is not None:
        keep = lengths <= spec.truncation
        lengths, counts = lengths[keep], counts[keep]
    max_len = int(lengths[-1]) if len(lengths) else 1
    _scan_capacity_check(mesh, max_len)
    q, td, tn = mesh.q, mesh.theta_den, mesh.theta_num
    d = q * q * td
    qtd = q * td
    residues = np.array([ell % q for ell in lengths.tolist()], dtype=np.int64)
    offsets = np.array([(ell * tn) % d for ell in lengths.tolist()], dtype=np.int64)
    imag = spec.kind == "imag"
    n_threads = resolve_threads(threads)

    starts = list(range(0, q, BLOCK))

    def work(j0):
        return _scan_block(j0, min(j0 + BLOCK, q), q, qtd, d, residues, offsets, counts, imag)

    if n_threads > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            chunks = list(pool.map(work, starts))
    else:
        chunks = [work(j0) for j0 in starts]

    best_val = NEG_INF
    best_j = 0
    for j0, acc in zip(starts, chunks):
        k = int(np.argmax(acc))
        v = float(acc[k])
        if v > best_val:
            best_val, best_j = v, j0 + k
    trace = np.concatenate(chunks) if want_trace else None
    return ScanResult(index=best_j, value=best_val, trace=trace)


def write_trace_csv(mesh, trace):
    """Trace CSV: a JSON mesh header line, then rows j,t_float,value."""
    import json

    lines = [
        "# "
        + json.dumps(
            {"q": mesh.q, "theta_num": mesh.theta_num, "theta_den": mesh.theta_den},
            sort_keys=True,
        ),
        "j,t_float,value",
    ]
    d = mesh.q * mesh.q * mesh.theta_den
    qtd = mesh.q * mesh.theta_den
    for j, v in enumerate(trace.tolist()):
        t = (j * qtd + mesh.theta_num) / d
        lines.append(f"{j},{t!r},{'-inf' if v == NEG_INF else repr(v)}")
    return "\n".join(lines) + "\n"
