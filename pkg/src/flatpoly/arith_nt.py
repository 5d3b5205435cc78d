"""Liouville-function sieve and exponential-sum probes.

lambda(n) is +1 when n has an even number of prime factors counted with
multiplicity and -1 otherwise; lambda(1) = 1.  The sieve is
smallest-prime-factor based with O(N) memory.  Partial-sum and norm
sweeps are observational probes only: no verdict on any conditional
statement is ever produced.
"""

from __future__ import annotations

import csv
import math
import struct
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

# Desk-scale cap on the sieve bound; the SPF table costs ~4N bytes.
SIEVE_CAP = 10**8

_BITS_MAGIC = b"LAMB"


@dataclass(frozen=True)
class LiouvilleTable:
    """Values lambda(1..N), stored as int8 with a dead slot at index 0."""

    N: int
    lam: np.ndarray  # shape (N+1,), lam[0] unused

    def __post_init__(self):
        self.lam.setflags(write=False)

    def __call__(self, n: int) -> int:
        if not 1 <= n <= self.N:
            raise ParameterError(f"n={n} outside table range 1..{self.N}")
        return int(self.lam[n])

    def to_bits(self) -> bytes:
        """Compact export: 4-byte magic, uint64-LE bound N, then packed
        bits (bit i set iff lambda(i+1) == -1, np.packbits big-endian
        within each byte)."""
        payload = np.packbits(self.lam[1:] == -1)
        return _BITS_MAGIC + struct.pack("<Q", self.N) + payload.tobytes()

    @classmethod
    def from_bits(cls, blob: bytes) -> "LiouvilleTable":
        if blob[:4] != _BITS_MAGIC:
            raise ParameterError("bad magic in Liouville bit table")
        (n,) = struct.unpack("<Q", blob[4:12])
        bits = np.unpackbits(np.frombuffer(blob[12:], dtype=np.uint8), count=n)
        lam = np.empty(n + 1, dtype=np.int8)
        lam[0] = 0
        lam[1:] = np.where(bits == 1, -1, 1)
        return cls(N=n, lam=lam)


def liouville_sieve(N: int) -> LiouvilleTable:
    """Sieve lambda(1..N) exactly.

    Smallest-prime-factor sieve, then lambda = (-1)^Omega computed by
    repeatedly dividing out spf in vectorized rounds (at most log2 N
    rounds, each O(N)).
    """
    if N < 1:
        raise ParameterError("sieve bound must be >= 1")
    if N > SIEVE_CAP:
        raise ParameterError(f"sieve bound {N} exceeds configured cap {SIEVE_CAP}")
    spf = np.zeros(N + 1, dtype=np.int32)
    for p in range(2, math.isqrt(N) + 1):
        if spf[p] == 0:
            block = spf[p * p :: p]
            block[block == 0] = p
    unset = spf == 0
    spf[unset] = np.arange(N + 1, dtype=np.int32)[unset]  # remaining are primes (and 0,1)

    omega = np.zeros(N + 1, dtype=np.int8)
    cur = np.arange(N + 1, dtype=np.int64)
    cur[:2] = 1
    while True:
        live = cur > 1
        if not live.any():
            break
        omega[live] += 1
        cur[live] //= spf[cur[live]]
    lam = np.where(omega % 2 == 0, 1, -1).astype(np.int8)
    lam[0] = 0
    return LiouvilleTable(N=N, lam=lam)


def liouville_norm_sweep(N_list, alphas, csv_path=None, table: LiouvilleTable | None = None):
    """Normalized alpha-norm ratios of the Liouville polynomials.

    For each (N, alpha) returns ||P_N||_alpha / sqrt(N) where P_N has
    coefficient lambda(k) at exponent k-1 (so ||P_N||_2 = sqrt(N)
    exactly).  alpha may be math.inf, which means the refined sup norm.
    Rows are (N, alpha, ratio); csv_path, when given, receives them with
    a header line.
    """
    from . import norm_engine, poly_core

    N_list = list(N_list)
    alphas = list(alphas)
    for n in N_list:
        if n < 1:
            raise ParameterError("every sweep bound must be >= 1")
    if table is None or table.N < max(N_list):
        table = liouville_sieve(max(N_list))
    rows = []
    for n in N_list:
        poly = poly_core.gen_liouville(n, table=table)
        grid = norm_engine.evaluate_on_grid(poly)
        root_n = math.sqrt(n)
        for alpha in alphas:
            if math.isinf(alpha):
                val = norm_engine.sup_norm(poly, grid)
            else:
                val = norm_engine.lp_norm(poly, alpha, grid)
            rows.append((n, float(alpha), val / root_n))
    if csv_path is not None:
        with open(csv_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["N", "alpha", "ratio"])
            writer.writerows(rows)
    return rows


@dataclass(frozen=True)
class PartialSumProbe:
    """Largest |sum_{n<=M} lambda(n)| / sqrt(M) over M = 1..N."""

    N: int
    max_ratio: float
    argmax_M: int
    sum_at_N: int


def partial_sum_ratio(N: int, table: LiouvilleTable | None = None) -> PartialSumProbe:
    """Exact integer partial sums of lambda; reports the maximum of
    |S_M|/sqrt(M) and where it occurs.  Observed values only; no claim
    about the known far crossings is made."""
    if N < 1:
        raise ParameterError("N must be >= 1")
    if table is None or table.N < N:
        table = liouville_sieve(N)
    sums = np.cumsum(table.lam[1 : N + 1], dtype=np.int64)
    ratios = np.abs(sums) / np.sqrt(np.arange(1, N + 1, dtype=np.float64))
    best = int(np.argmax(ratios))
    return PartialSumProbe(
        N=N,
        max_ratio=float(ratios[best]),
        argmax_M=best + 1,
        sum_at_N=int(sums[-1]),
    )
