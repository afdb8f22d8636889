"""Finite-matrix realization and independent oracles.

Vectorization is row-major (C order): vec(Q)[i*d+j] = Q[i,j]. With that
convention the inner derivation Q -> [A,Q] has matrix A(x)I - I(x)A^T and
left multiplication has matrix A(x)I, so M @ vec(Q) = vec(A@Q - Q@A) holds
exactly; this is the contract every representation test checks.

Random fixtures draw from numpy's PCG64 generator seeded with
SeedSequence(seed): first the real part, then the imaginary part of each
matrix, row-major, via standard_normal; generated matrices are rescaled to
the requested spectral norm. This pins fixture bytes across platforms.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import BadDimension, SpectrumOutOfDomain, UnassignedSymbol
from .freealg import NcPoly, as_poly
from .qderiv import derivative_hyper
from .series import ScalarSeries

_EIG_COND_LIMIT = 1e8
_DEFLATE = 1e-6
_SERIES_TOL = 5e-15
_SERIES_MAX_TERMS = 300


def vec(q: np.ndarray) -> np.ndarray:
    return np.asarray(q).reshape(-1)


def unvec(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v)
    d = math.isqrt(v.size)
    return v.reshape(d, d)


def ad_matrix(a: np.ndarray) -> np.ndarray:
    """Matrix of Q -> [a, Q] on vectorized operands."""
    a = np.asarray(a)
    d = a.shape[0]
    eye = np.eye(d)
    return np.kron(a, eye) - np.kron(eye, a.T)


def left_mul_matrix(a: np.ndarray) -> np.ndarray:
    """Matrix of Q -> a @ Q on vectorized operands."""
    a = np.asarray(a)
    return np.kron(a, np.eye(a.shape[0]))


def rel_residual(lhs: np.ndarray, rhs: np.ndarray) -> float:
    """Scale-free residual: ||L-R||_F / (1 + ||R||_F)."""
    lhs, rhs = np.asarray(lhs), np.asarray(rhs)
    return float(np.linalg.norm(lhs - rhs) / (1.0 + np.linalg.norm(rhs)))


@dataclass
class MatrixAssignment:
    """Square complex matrices of a common dimension, keyed by symbol name."""

    dim: int
    entries: dict
    seed: int
    scale: float
    kind: str = "random"

    def __getitem__(self, name: str) -> np.ndarray:
        return self.entries[name]

    def __contains__(self, name: str) -> bool:
        return name in self.entries

    def var_count(self) -> int:
        """Number of indexed auxiliary variables (H1, H2, ...)."""
        return sum(1 for k in self.entries if re.fullmatch(r"H\d+", k))


def eval_poly(p: NcPoly, m: MatrixAssignment) -> np.ndarray:
    """Homomorphic evaluation: words become matrix products, coefficients
    become complex scalars."""
    p = as_poly(p)
    d = m.dim
    out = np.zeros((d, d), dtype=complex)
    eye = np.eye(d, dtype=complex)
    for w, c in p.terms.items():
        acc = eye
        for letter in w:
            if letter not in m.entries:
                raise UnassignedSymbol(f"no matrix assigned to symbol {letter!r}")
            acc = acc @ m.entries[letter]
        out = out + complex(c) * acc
    return out


# scalar-function descriptors for functions of hyperoperator matrices

class FuncDescriptor:
    """Analytic scalar function: pointwise values with removable
    singularities handled by series, plus Taylor data about a center."""

    name = "?"
    center = 0.0

    def scalar(self, z: complex) -> complex:
        raise NotImplementedError

    def series_coeff(self, k: int) -> complex:
        raise NotImplementedError


class Phi1(FuncDescriptor):
    """(e^z - 1)/z with value 1 at z = 0; entire, so the series path always
    converges."""

    name = "phi1"
    center = 0.0

    def scalar(self, z):
        if abs(z) < _DEFLATE:
            # series about 0, machine-exact for tiny |z|
            return sum(z ** k / math.factorial(k + 1) for k in range(8))
        return (np.exp(z) - 1.0) / z

    def series_coeff(self, k):
        return 1.0 / math.factorial(k + 1)


class G1(FuncDescriptor):
    """log(z)/(z - 1) with value 1 at z = 1."""

    name = "g1"
    center = 1.0

    def scalar(self, z):
        u = z - 1.0
        if abs(u) < _DEFLATE:
            return sum((-u) ** k / (k + 1) for k in range(8))
        return np.log(z) / u

    def series_coeff(self, k):
        return (-1.0) ** k / (k + 1)


class G2(FuncDescriptor):
    """((z+1)/(z-1)) log z with value 2 at z = 1; equals (z+1)*g1(z)."""

    name = "g2"
    center = 1.0
    _g1 = G1()

    def scalar(self, z):
        return (z + 1.0) * self._g1.scalar(z)

    def series_coeff(self, k):
        # (2 + u) * sum (-u)^k/(k+1) with u = z - center
        c = 2.0 * (-1.0) ** k / (k + 1)
        if k >= 1:
            c += (-1.0) ** (k - 1) / k
        return c


PHI1 = Phi1()
G1_FUNC = G1()
G2_FUNC = G2()

_DESCRIPTORS = {"phi1": PHI1, "g1": G1_FUNC, "g2": G2_FUNC}


def _poly_of_matrix(f: ScalarSeries, m: np.ndarray) -> np.ndarray:
    out = np.zeros_like(m, dtype=complex)
    eye = np.eye(m.shape[0], dtype=complex)
    for c in reversed(f.coeffs):
        out = out @ m + complex(c) * eye
    return out


def func_of_matrix(g, m: np.ndarray) -> np.ndarray:
    """g(M) for a descriptor (or descriptor name, or polynomial series).

    Polynomials evaluate directly. Otherwise: eigendecomposition when the
    eigenvector basis is well conditioned (eigenvalues near the removable
    singularity take the series value), else truncated Taylor series about
    the descriptor's center.
    """
    m = np.asarray(m, dtype=complex)
    if isinstance(g, ScalarSeries):
        return _poly_of_matrix(g, m)
    if isinstance(g, str):
        g = _DESCRIPTORS[g]
    try:
        w, v = np.linalg.eig(m)
        cond = np.linalg.cond(v)
    except np.linalg.LinAlgError:
        cond = np.inf
    if np.isfinite(cond) and cond < _EIG_COND_LIMIT:
        gw = np.array([g.scalar(z) for z in w])
        return v @ (gw[:, None] * np.linalg.inv(v))
    # series fallback about the center
    shifted = m - g.center * np.eye(m.shape[0])
    term = np.eye(m.shape[0], dtype=complex)
    out = g.series_coeff(0) * term
    shrink = 0
    for k in range(1, _SERIES_MAX_TERMS):
        term = term @ shifted
        step = g.series_coeff(k) * term
        out = out + step
        norm = np.linalg.norm(step)
        if norm <= _SERIES_TOL * (1.0 + np.linalg.norm(out)):
            shrink += 1
            if shrink >= 3:
                return out
        else:
            shrink = 0
    raise SpectrumOutOfDomain(
        f"{g.name}: eigendecomposition ill-conditioned and series did not converge"
    )


def hyper_func_apply(g, m: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Apply g(M) to the operand X through vectorization."""
    return unvec(func_of_matrix(g, m) @ vec(x))


def gateaux_oracle(f: ScalarSeries, a: np.ndarray, e: np.ndarray) -> np.ndarray:
    """Directional derivative of the matrix polynomial f at a in direction e:
    the (1,2) block of f([[a, e], [0, a]]). Exact for polynomials; no
    symbolic machinery involved."""
    a, e = np.asarray(a, complex), np.asarray(e, complex)
    d = a.shape[0]
    blk = np.block([[a, e], [np.zeros_like(a), a]])
    return _poly_of_matrix(f, blk)[:d, d:]


def frechet_oracle_n(f: ScalarSeries, a: np.ndarray, e: np.ndarray, n: int) -> np.ndarray:
    """n-th differential with all directions e: n! times the (1, n+1) block
    of f on the block-bidiagonal matrix with a on the diagonal and e on the
    superdiagonal."""
    if n < 1:
        raise ValueError("order must be >= 1")
    a, e = np.asarray(a, complex), np.asarray(e, complex)
    d = a.shape[0]
    big = np.zeros(((n + 1) * d, (n + 1) * d), dtype=complex)
    for i in range(n + 1):
        big[i * d : (i + 1) * d, i * d : (i + 1) * d] = a
        if i < n:
            big[i * d : (i + 1) * d, (i + 1) * d : (i + 2) * d] = e
    val = _poly_of_matrix(f, big)
    return math.factorial(n) * val[:d, n * d : (n + 1) * d]


def integral_rep_eval(f: ScalarSeries, n: int, a: np.ndarray, dirs) -> np.ndarray:
    """Evaluate the integral-representation derivative on concrete
    directions: each commuting monomial acts as
    a^p * (ad_a^b1 E1) * ... * (ad_a^bn En)."""
    dirs = [np.asarray(e, complex) for e in dirs]
    if len(dirs) != n:
        raise ValueError(f"need {n} directions, got {len(dirs)}")
    a = np.asarray(a, complex)
    chp = derivative_hyper(f, n)
    d = a.shape[0]
    out = np.zeros((d, d), dtype=complex)
    apow = {0: np.eye(d, dtype=complex)}

    def a_power(k):
        if k not in apow:
            apow[k] = a @ a_power(k - 1)
        return apow[k]

    ad_cache = {}

    def ad_power(j, b):
        if (j, b) not in ad_cache:
            if b == 0:
                ad_cache[(j, b)] = dirs[j]
            else:
                prev = ad_power(j, b - 1)
                ad_cache[(j, b)] = a @ prev - prev @ a
        return ad_cache[(j, b)]

    for c, p, bs in chp.monomials():
        acc = a_power(p)
        for j, b in enumerate(bs):
            acc = acc @ ad_power(j, b)
        out = out + complex(c) * acc
    return out


# fixtures

def _rng(seed) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def _ginibre(rng, d: int) -> np.ndarray:
    re = rng.standard_normal((d, d))
    im = rng.standard_normal((d, d))
    return (re + 1j * im) / math.sqrt(2.0)


def _scaled(x: np.ndarray, scale: float) -> np.ndarray:
    nrm = np.linalg.norm(x, 2)
    if nrm == 0:
        return x
    return x * (scale / nrm)


def _distinct_diag(rng, d: int, scale: float) -> np.ndarray:
    # evenly separated magnitudes with random phases: gaps stay bounded away from 0
    mags = scale * (np.arange(1, d + 1) / d)
    phases = np.exp(2j * np.pi * rng.random(d))
    return np.diag(mags * phases)


def _pair_shift(rng, d: int, scale: float) -> np.ndarray:
    """Nilpotent built on disjoint index pairs (2k -> 2k+1), so every product
    of two entries vanishes structurally and [H, [H, A]] is exactly zero for
    diagonal A."""
    h = np.zeros((d, d), dtype=complex)
    for k in range(d // 2):
        z = rng.standard_normal() + 1j * rng.standard_normal()
        h[2 * k, 2 * k + 1] = z
    return _scaled(h, scale)


def make_fixture(kind: str, dim: int, seed: int, scale: float = 0.5,
                 names=("A", "B")) -> MatrixAssignment:
    """Deterministic fixture kinds:

    - random: independent complex Ginibre matrices scaled to spectral norm
      <= scale, one per requested name.
    - commuting: simultaneously diagonal matrices.
    - auxiliary_pair: diagonal A with distinct entries plus a disjoint-pair
      nilpotent H with [H,[H,A]] = 0 exactly; dA = [H,A] is included.
    - multivariate_auxiliary: block-diagonal A_j, H_j (q = max(1, dim // 2)
      blocks of size >= 2) satisfying the pairwise commutation conditions
      blockwise, with scalar offsets off-block so cross products do not
      vanish; dA_j = [H_j, A_j] included.
    """
    if dim < 1:
        raise BadDimension("dimension must be >= 1")
    rng = _rng(seed)
    entries = {}
    if kind == "random":
        for name in names:
            entries[name] = _scaled(_ginibre(rng, dim), scale)
    elif kind == "commuting":
        for name in names:
            z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
            entries[name] = np.diag(z * (scale / max(np.abs(z))))
    elif kind == "auxiliary_pair":
        if dim < 2:
            raise BadDimension("auxiliary_pair needs dimension >= 2")
        a = _distinct_diag(rng, dim, scale)
        h = _pair_shift(rng, dim, scale)
        entries["A"] = a
        entries["H"] = h
        entries["dA"] = h @ a - a @ h
    elif kind == "multivariate_auxiliary":
        if dim < 2:
            raise BadDimension("multivariate_auxiliary needs dimension >= 2")
        q = max(1, dim // 2)
        sizes = [2] * q
        sizes[-1] += dim - 2 * q
        starts = np.cumsum([0] + sizes[:-1])
        for j in range(q):
            s, size = int(starts[j]), sizes[j]
            a = np.zeros((dim, dim), dtype=complex)
            h = np.zeros((dim, dim), dtype=complex)
            blk_rng_a = _distinct_diag(rng, size, scale)
            blk_h = _pair_shift(rng, size, scale)
            a[s : s + size, s : s + size] = blk_rng_a
            h[s : s + size, s : s + size] = blk_h
            # scalar offsets on the other blocks keep [H_k, A_j] = 0 exact
            for k in range(q):
                if k == j:
                    continue
                t, tsize = int(starts[k]), sizes[k]
                off = (rng.standard_normal() + 1j * rng.standard_normal()) * scale / 3
                a[t : t + tsize, t : t + tsize] += off * np.eye(tsize)
            entries[f"A{j + 1}"] = a
            entries[f"H{j + 1}"] = h
            entries[f"dA{j + 1}"] = h @ a - a @ h
    else:
        raise ValueError(f"unknown fixture kind {kind!r}")
    return MatrixAssignment(dim=dim, entries=entries, seed=seed, scale=scale, kind=kind)


# canned fixtures: fixed entries, used by the shipped quadrature checks

def canned_fixtures() -> list:
    """Small deterministic assignments with hard-coded entries."""
    a2 = np.array([[0.20, 0.10], [-0.05, -0.15]], dtype=complex)
    b2 = np.array([[0.00, 0.25j], [0.25j, 0.10]], dtype=complex)
    a3 = np.array(
        [[0.15, 0.05, 0.0], [0.0, -0.10, 0.08], [0.02, 0.0, 0.05]], dtype=complex
    )
    b3 = np.array(
        [[0.0, 0.12, -0.03], [0.1, 0.05, 0.0], [0.0, -0.07j, -0.02]], dtype=complex
    )
    return [
        MatrixAssignment(2, {"A": a2, "B": b2}, seed=0, scale=0.3, kind="canned"),
        MatrixAssignment(3, {"A": a3, "B": b3}, seed=0, scale=0.3, kind="canned"),
    ]


@dataclass
class CheckReport:
    """Outcome of one identity check over seeded trials."""

    identity: str
    trials: int
    dim: int
    seed: int
    max_residual: float
    tol: float
    passed: bool
    runtime_ms: float

    def to_obj(self):
        return {
            "identity": self.identity,
            "trials": self.trials,
            "dim": self.dim,
            "seed": self.seed,
            "max_residual": self.max_residual,
            "tol": self.tol,
            "pass": self.passed,
            "runtime_ms": self.runtime_ms,
        }

    @classmethod
    def from_obj(cls, obj) -> "CheckReport":
        return cls(
            identity=obj["identity"],
            trials=obj["trials"],
            dim=obj["dim"],
            seed=obj["seed"],
            max_residual=obj["max_residual"],
            tol=obj["tol"],
            passed=obj["pass"],
            runtime_ms=obj["runtime_ms"],
        )
