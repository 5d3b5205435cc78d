"""Polynomials on the unit circle: generator families and coefficient algebra.

A CirclePolynomial is a finitely supported complex coefficient sequence
over exponents 0..d.  Several source formulas index coefficients from 1;
storage here is always 0-based, which multiplies the function on the
circle by a power of z and therefore changes no modulus |P(z)| and no
flatness metric.  The coefficient criterion keeps its 1-based weights
explicitly (see the criterion module).

All values are immutable after construction and every operation is a
pure function, so concurrent use from many threads is safe.  Reductions
go through numpy, whose pairwise summation is fixed-order and
independent of thread count.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .arith_nt import LiouvilleTable, liouville_sieve
from .errors import DegenerateInputError, ParameterError

# Deterministic RNG: Philox is counter-based, so streams are reproducible
# across platforms and splittable via SeedSequence-derived keys.
RNG_NAME = "philox4x64"

# multiply() switches from direct convolution to scatter-add / FFT above
# this many coefficient products.
_DIRECT_CONV_CAP = 4_000_000
_SCATTER_NNZ_CAP = 64

# autocorrelation() goes grid-based above this degree (design cross-checked
# against the direct path in the tests).
_AUTOCORR_DIRECT_CAP = 2048

GENERATOR_FAMILIES = (
    "littlewood-random",
    "unimodular-phases",
    "gauss-fresnel",
    "blaschke",
    "liouville",
)


@dataclass(frozen=True)
class CirclePolynomial:
    """Dense complex coefficients, exponent j at index j, trailing zeros
    trimmed (the zero polynomial is the single coefficient 0)."""

    coeffs: np.ndarray

    def __init__(self, coeffs):
        arr = np.asarray(coeffs, dtype=np.complex128)
        if arr.ndim != 1 or arr.size == 0:
            raise ParameterError("coefficients must be a nonempty 1-d sequence")
        end = arr.size
        while end > 1 and arr[end - 1] == 0:
            end -= 1
        arr = arr[:end].copy()
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def is_zero(self) -> bool:
        return self.coeffs.size == 1 and self.coeffs[0] == 0

    def l2_norm(self) -> float:
        """sqrt of the sum of squared coefficient moduli (Parseval)."""
        return math.sqrt(self.l2_norm_sq())

    def l2_norm_sq(self) -> float:
        c = self.coeffs
        return float(np.sum((c * c.conj()).real))

    def normalized(self) -> "CirclePolynomial":
        nrm = self.l2_norm()
        if nrm == 0.0:
            raise DegenerateInputError("cannot normalize the zero polynomial")
        return CirclePolynomial(self.coeffs / nrm)

    def scale(self, c) -> "CirclePolynomial":
        return CirclePolynomial(self.coeffs * c)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CirclePolynomial):
            return NotImplemented
        return np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self):
        return hash(self.coeffs.tobytes())

    def __repr__(self):
        return f"CirclePolynomial(degree={self.degree})"

    # -- export ----------------------------------------------------------

    def to_csv(self) -> str:
        """Rows (exponent, re, im), with header."""
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["exponent", "re", "im"])
        for j, c in enumerate(self.coeffs):
            writer.writerow([j, repr(c.real), repr(c.imag)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "CirclePolynomial":
        rows = list(csv.reader(io.StringIO(text)))
        coeffs = np.zeros(len(rows) - 1, dtype=np.complex128)
        for exp, re, im in rows[1:]:
            coeffs[int(exp)] = complex(float(re), float(im))
        return cls(coeffs)

    def to_json_array(self) -> str:
        """Compact form: [[re, im], ...] indexed by exponent."""
        return json.dumps([[c.real, c.imag] for c in self.coeffs])

    @classmethod
    def from_json_array(cls, text: str) -> "CirclePolynomial":
        pairs = json.loads(text)
        return cls([complex(re, im) for re, im in pairs])


@dataclass(frozen=True)
class SignSequence:
    """A +-1 sequence of length >= 1."""

    signs: tuple

    def __init__(self, signs):
        signs = tuple(int(s) for s in signs)
        if len(signs) == 0:
            raise ParameterError("sign sequence must be nonempty")
        if any(s not in (1, -1) for s in signs):
            raise ParameterError("sign sequence entries must be +1 or -1")
        object.__setattr__(self, "signs", signs)

    def __len__(self):
        return len(self.signs)

    def __iter__(self):
        return iter(self.signs)

    def to_polynomial(self, normalized: bool = False) -> CirclePolynomial:
        poly = CirclePolynomial(np.array(self.signs, dtype=np.complex128))
        return poly.normalized() if normalized else poly


@dataclass(frozen=True)
class GeneratorSpec:
    """Serializable recipe for one polynomial.

    family-specific fields: seed for littlewood-random, a in (0,1) for
    blaschke, phases (length n) for unimodular-phases.  normalized
    divides by the l2 norm.
    """

    family: str
    n: int
    seed: int | None = None
    a: float | None = None
    phases: tuple | None = None
    normalized: bool = False

    def __post_init__(self):
        if self.phases is not None:
            object.__setattr__(self, "phases", tuple(float(p) for p in self.phases))
        if self.family not in GENERATOR_FAMILIES:
            raise ParameterError(
                f"unknown family {self.family!r}; expected one of {GENERATOR_FAMILIES}"
            )
        if self.n < 1:
            raise ParameterError("generator length n must be >= 1")
        if self.family == "littlewood-random" and self.seed is None:
            raise ParameterError("littlewood-random requires a seed")
        if self.family == "blaschke":
            if self.a is None or not 0.0 < self.a < 1.0:
                raise ParameterError("blaschke requires a strictly inside (0, 1)")
            if self.n < 2:
                raise ParameterError("blaschke requires n >= 2")
        if self.family == "unimodular-phases":
            if self.phases is None:
                raise ParameterError("unimodular-phases requires phases")
            if len(self.phases) != self.n:
                raise ParameterError("phases must have length n")

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "n": self.n,
            "seed": self.seed,
            "a": self.a,
            "phases": list(self.phases) if self.phases is not None else None,
            "normalized": self.normalized,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "GeneratorSpec":
        phases = obj.get("phases")
        return cls(
            family=obj["family"],
            n=int(obj["n"]),
            seed=None if obj.get("seed") is None else int(obj["seed"]),
            a=None if obj.get("a") is None else float(obj["a"]),
            phases=None if phases is None else tuple(phases),
            normalized=bool(obj.get("normalized", False)),
        )

    @classmethod
    def from_json(cls, text: str) -> "GeneratorSpec":
        return cls.from_dict(json.loads(text))


# -- deterministic randomness ---------------------------------------------


def derive_seed(base_seed: int, *branch: int) -> int:
    """64-bit child seed for stream (base_seed, *branch); deterministic
    mixing via numpy's SeedSequence so parallel sample suites are
    reproducible sample-by-sample."""
    ss = np.random.SeedSequence((int(base_seed),) + tuple(int(b) for b in branch))
    return int(ss.generate_state(1, np.uint64)[0])


def _sign_stream(n: int, seed: int) -> np.ndarray:
    bg = np.random.Philox(key=int(seed) & ((1 << 128) - 1))
    raw = bg.random_raw(n)
    return np.where(raw & 1, 1.0, -1.0)


# -- generator families ----------------------------------------------------


def gen_littlewood(n: int, seed: int, normalized: bool = False) -> CirclePolynomial:
    """Random +-1 coefficients over exponents 0..n-1, reproducible
    bit-for-bit from the seed (generator: RNG_NAME, sign = low bit of the
    raw stream)."""
    if n < 1:
        raise ParameterError("littlewood length must be >= 1")
    signs = _sign_stream(n, seed)
    if normalized:
        signs = signs / math.sqrt(n)
    return CirclePolynomial(signs.astype(np.complex128))


def gen_unimodular(phases: Sequence[float], normalized: bool = False) -> CirclePolynomial:
    """Coefficients e^{i phi_j} for the given phase sequence."""
    phases = np.asarray(phases, dtype=np.float64)
    if phases.size < 1:
        raise ParameterError("phase sequence must be nonempty")
    coeffs = np.exp(1j * phases)
    if normalized:
        coeffs = coeffs / math.sqrt(phases.size)
    return CirclePolynomial(coeffs)


def gen_gauss_fresnel(n: int, normalized: bool = False) -> CirclePolynomial:
    """Quadratic-phase unimodular coefficients exp(i pi j^2 / n)."""
    if n < 1:
        raise ParameterError("gauss-fresnel length must be >= 1")
    j = np.arange(n, dtype=np.float64)
    # Reduce j^2/n mod 2 before multiplying by pi: keeps the phase argument
    # small so coefficients stay accurate at large n.
    phase = np.mod(j * j / n, 2.0)
    coeffs = np.exp(1j * math.pi * phase)
    if normalized:
        coeffs = coeffs / math.sqrt(n)
    return CirclePolynomial(coeffs)


def gen_blaschke(n: int, a: float) -> CirclePolynomial:
    """Truncated Blaschke-factor expansion: constant term -a, then
    a^{j-1}(1-a^2) at exponents j = 1..n-1.  Approximates the
    modulus-one rational (z-a)/(1-az) with a geometric tail of size
    (1-a^2) a^{n-1} / (1-a)."""
    if n < 2:
        raise ParameterError("blaschke family needs n >= 2")
    if not 0.0 < a < 1.0:
        raise ParameterError("blaschke parameter a must lie strictly in (0, 1)")
    coeffs = np.empty(n, dtype=np.complex128)
    coeffs[0] = -a
    coeffs[1:] = (1.0 - a * a) * a ** np.arange(n - 1, dtype=np.float64)
    return CirclePolynomial(coeffs)


def gen_liouville(
    N: int, normalized: bool = False, table: LiouvilleTable | None = None
) -> CirclePolynomial:
    """Coefficient lambda(k) at exponent k-1 for k = 1..N.  The shift to
    0-based exponents leaves |P| on the circle unchanged."""
    if N < 1:
        raise ParameterError("liouville length must be >= 1")
    if table is None or table.N < N:
        table = liouville_sieve(N)
    coeffs = table.lam[1 : N + 1].astype(np.complex128)
    if normalized:
        coeffs = coeffs / math.sqrt(N)
    return CirclePolynomial(coeffs)


def generate(spec: GeneratorSpec) -> CirclePolynomial:
    """Dispatch a GeneratorSpec to its family generator."""
    if spec.family == "littlewood-random":
        return gen_littlewood(spec.n, spec.seed, spec.normalized)
    if spec.family == "unimodular-phases":
        return gen_unimodular(spec.phases, spec.normalized)
    if spec.family == "gauss-fresnel":
        return gen_gauss_fresnel(spec.n, spec.normalized)
    if spec.family == "blaschke":
        poly = gen_blaschke(spec.n, spec.a)
        return poly.normalized() if spec.normalized else poly
    if spec.family == "liouville":
        return gen_liouville(spec.n, spec.normalized)
    raise ParameterError(f"unknown family {spec.family!r}")


# -- coefficient algebra ----------------------------------------------------


def add(P: CirclePolynomial, Q: CirclePolynomial) -> CirclePolynomial:
    a, b = P.coeffs, Q.coeffs
    out = np.zeros(max(a.size, b.size), dtype=np.complex128)
    out[: a.size] += a
    out[: b.size] += b
    return CirclePolynomial(out)


def subtract(P: CirclePolynomial, Q: CirclePolynomial) -> CirclePolynomial:
    return add(P, Q.scale(-1.0))


def multiply(P: CirclePolynomial, Q: CirclePolynomial) -> CirclePolynomial:
    """Exact coefficient convolution; degree adds.

    Three paths, all computing the same sums: direct convolution for
    small products, scatter-add over the sparser operand's support when
    it has few nonzeros (exact, used by Riesz partial products whose
    factors are sparse after power substitution), FFT convolution
    otherwise.
    """
    a, b = P.coeffs, Q.coeffs
    if P.is_zero() or Q.is_zero():
        return CirclePolynomial([0.0])
    if a.size * b.size <= _DIRECT_CONV_CAP:
        return CirclePolynomial(np.convolve(a, b))
    nnz_a, nnz_b = np.count_nonzero(a), np.count_nonzero(b)
    if min(nnz_a, nnz_b) <= _SCATTER_NNZ_CAP:
        if nnz_b <= nnz_a:
            sparse, dense = b, a
        else:
            sparse, dense = a, b
        out = np.zeros(a.size + b.size - 1, dtype=np.complex128)
        for e in np.flatnonzero(sparse):
            out[e : e + dense.size] += sparse[e] * dense
        return CirclePolynomial(out)
    m = a.size + b.size - 1
    fft_len = 1 << (m - 1).bit_length()
    prod = np.fft.ifft(np.fft.fft(a, fft_len) * np.fft.fft(b, fft_len))[:m]
    return CirclePolynomial(prod)


def substitute_power(P: CirclePolynomial, N: int) -> CirclePolynomial:
    """P(z^N): coefficient j moves to exponent N*j, zeros in between."""
    if N < 1:
        raise ParameterError("substitution power must be >= 1")
    if N == 1:
        return P
    out = np.zeros(N * P.degree + 1, dtype=np.complex128)
    out[::N] = P.coeffs
    return CirclePolynomial(out)


def autocorrelation(P: CirclePolynomial) -> np.ndarray:
    """gamma_k = sum_j a_j * conj(a_{j+k}) for k = 0..deg P.

    gamma_0 is the squared l2 norm; negative lags are conjugates and not
    stored.  Direct summation below degree _AUTOCORR_DIRECT_CAP, padded
    FFT above (no wraparound since the transform length exceeds 2d+1).
    """
    a = P.coeffs
    d = P.degree
    if d <= _AUTOCORR_DIRECT_CAP:
        r = np.correlate(a, a, mode="full")
        return r[: d + 1][::-1]
    fft_len = 1 << (2 * d + 1).bit_length()
    spec = np.fft.fft(a, fft_len)
    circ = np.fft.ifft(spec * spec.conj())
    return circ[: d + 1].conj()


def evaluate(P: CirclePolynomial, z) -> np.ndarray | complex:
    """Horner evaluation at arbitrary points (scalar or array)."""
    return np.polyval(P.coeffs[::-1], z)
