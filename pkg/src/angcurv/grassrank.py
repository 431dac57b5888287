"""Quadratic functions on Grassmannians, numerically.

Even weights of smooth angular curvature measures of degree k are the
restrictions of quadratic forms in the Plücker coordinates.  This module
measures the dimension of that space by sampling, compares it with the
closed formula and with the span of weights coming from constant
coefficient forms, and checks the obstruction family that rules out
higher-degree highest weight vectors.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations_with_replacement

import numpy as np

from . import _mc
from .curvmeas import ConstCoeff
from .exterior import BiGradedForm, complement_batch, plucker_coords

RANK_RTOL = 1e-9


@dataclass(frozen=True, eq=False)
class GrassSample:
    n: int
    k: int
    frames: np.ndarray
    seed: int | None

    @cached_property
    def plucker(self) -> np.ndarray:
        return plucker_coords(self.frames)

    def __len__(self) -> int:
        return self.frames.shape[0]


def sample_grassmann(n: int, k: int, count: int, seed: int | None = 0) -> GrassSample:
    """Invariant-measure sample: QR of Gaussian n×k matrices, sign-fixed so R has a positive diagonal."""
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got k={k}, n={n}")
    rng = _mc.substream(seed, 0x6A55, n, k)
    g = rng.standard_normal((count, n, k))
    while k:
        s = np.linalg.svd(g, compute_uv=False)
        bad = s[:, -1] < 1e-8 * s[:, 0]
        if not bad.any():
            break
        g[bad] = rng.standard_normal((int(bad.sum()), n, k))
    q, r = np.linalg.qr(g)
    d = np.sign(np.diagonal(r, axis1=1, axis2=2))
    d[d == 0] = 1.0
    return GrassSample(n, k, q * d[:, None, :], seed)


def dim_formula(n: int, k: int) -> int:
    """``C(n,k) C(n+1,k+1) / (n-k+1)``, cross-checked against ``C(n,k)^2 - C(n,k-1) C(n,k+1)``."""
    if not 0 <= k < n - 1:
        raise ValueError(f"dimension formula needs 0 <= k < n-1, got (n, k) = ({n}, {k})")
    num = math.comb(n, k) * math.comb(n + 1, k + 1)
    a, rem = divmod(num, n - k + 1)
    b = math.comb(n, k) ** 2 - (math.comb(n, k - 1) if k else 0) * math.comb(n, k + 1)
    if rem or a != b:
        raise ArithmeticError(f"dimension expressions disagree at ({n}, {k}): {num}/{n - k + 1} vs {b}")
    return a


def monomial_pairs(m: int) -> list[tuple[int, int]]:
    return list(combinations_with_replacement(range(m), 2))


def quadratic_monomials(p: np.ndarray) -> np.ndarray:
    """Columns ``p_I p_J`` for ``I <= J`` (Plücker index order)."""
    i, j = np.triu_indices(p.shape[1])
    return p[:, i] * p[:, j]


@dataclass(frozen=True)
class RankReport:
    n: int
    k: int
    rank: int
    expected: int | None
    singular_values: np.ndarray
    cutoff: float
    gap: float
    stable: bool
    max_residual: float | None = None

    @property
    def verdict(self) -> str:
        if not self.stable:
            return "unstable"
        if self.expected is None:
            return "no-formula"
        return "pass" if self.rank == self.expected else "fail"

    def to_json(self) -> dict:
        out = {
            "n": self.n,
            "k": self.k,
            "expected_dim": self.expected,
            "expected": self.expected,
            "rank": self.rank,
            "singular_value_gap": self.gap if math.isfinite(self.gap) else "inf",
            "verdict": self.verdict,
        }
        if self.max_residual is not None:
            out["max_span_residual"] = self.max_residual
        return out


def numerical_rank(a: np.ndarray, rtol: float = RANK_RTOL):
    """Rank with relative cutoff, plus the gap around it.

    ``gap`` is ``s_r / s_{r+1}``; when nothing falls below the cutoff it is
    ``s_r / cutoff``.  The rank is stable when ``s_r >= 10·cutoff`` and
    ``s_{r+1} <= cutoff / 10``.
    """
    s = np.linalg.svd(a, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0, s, 0.0, math.inf, True
    cutoff = rtol * s[0]
    r = int(np.sum(s > cutoff))
    below = s[r] if r < s.size else 0.0
    gap = s[r - 1] / below if below > 0 else (s[r - 1] / cutoff if r == s.size else math.inf)
    stable = s[r - 1] >= 10 * cutoff and below <= cutoff / 10
    return r, s, cutoff, gap, stable


def _expected(n: int, k: int) -> int | None:
    try:
        return dim_formula(n, k)
    except ValueError:
        return None


def _default_samples(n: int, k: int) -> int:
    return 3 * math.comb(math.comb(n, k) + 1, 2)


def restriction_rank(n: int, k: int, sample_count: int | None = None, seed: int | None = 0) -> RankReport:
    """Dimension of the span of quadratic Plücker monomials restricted to ``Grass_k(R^n)``."""
    m = math.comb(math.comb(n, k) + 1, 2)
    sample_count = sample_count or _default_samples(n, k)
    if sample_count < 2 * m:
        raise ValueError(f"need at least {2 * m} samples for (n, k) = ({n}, {k})")
    gs = sample_grassmann(n, k, sample_count, seed)
    r, s, cut, gap, stable = numerical_rank(quadratic_monomials(gs.plucker))
    return RankReport(n, k, r, _expected(n, k), s, cut, gap, stable)


def random_forms(n: int, k: int, count: int, seed: int | None = 0) -> list[BiGradedForm]:
    rng = _mc.substream(seed, 0xF0F0, n, k)
    return [BiGradedForm.random(n, k, n - k, rng) for _ in range(count)]


def weight_matrix(forms: list[BiGradedForm], gs: GrassSample) -> np.ndarray:
    """Rows: ConstCoeff weights of each form on the shared sample."""
    return np.array([ConstCoeff(w).values(gs.frames) for w in forms]).reshape(len(forms), len(gs))


def span_residuals(rows: np.ndarray, basis_matrix: np.ndarray, rtol: float = RANK_RTOL) -> np.ndarray:
    """Relative distance of each row of ``rows`` from the column space of ``basis_matrix``."""
    u, s, _ = np.linalg.svd(basis_matrix, full_matrices=False)
    r = int(np.sum(s > rtol * s[0])) if s.size else 0
    u = u[:, :r]
    proj = rows @ u @ u.T
    nrm = np.linalg.norm(rows, axis=1)
    res = np.linalg.norm(rows - proj, axis=1)
    return np.where(nrm > 0, res / np.where(nrm > 0, nrm, 1.0), 0.0)


def constcoeff_weight_rank(
    n: int,
    k: int,
    form_count: int | None = None,
    sample_count: int | None = None,
    seed: int | None = 0,
) -> RankReport:
    """Rank of the weights of random constant (k, n-k)-forms, and their distance from the quadratic span."""
    expected = _expected(n, k)
    floor = 2 * (expected if expected is not None else math.comb(n, k) ** 2)
    form_count = form_count or max(floor, 2 * math.comb(n, k) ** 2)
    if form_count < floor:
        raise ValueError(f"need at least {floor} forms for (n, k) = ({n}, {k})")
    sample_count = sample_count or _default_samples(n, k)
    gs = sample_grassmann(n, k, sample_count, seed)
    W = weight_matrix(random_forms(n, k, form_count, seed), gs)
    r, s, cut, gap, stable = numerical_rank(W)
    resid = span_residuals(W, quadratic_monomials(gs.plucker))
    return RankReport(n, k, r, expected, s, cut, gap, stable, float(resid.max(initial=0.0)))


# -- highest weight vectors ----------------------------------------------------


@dataclass(frozen=True)
class HighestWeightSpec:
    """Weight ``(2m_1, …, 2m_{k'}, 0, …)`` with ``k' = min(k, n-k)``; short ``m`` is zero-padded."""

    m: tuple[int, ...]
    n: int
    k: int

    def __post_init__(self):
        kp = min(self.k, self.n - self.k)
        m = tuple(int(x) for x in self.m)
        if len(m) > kp:
            raise ValueError(f"at most {kp} entries allowed for (n, k) = ({self.n}, {self.k})")
        m = m + (0,) * (kp - len(m))
        object.__setattr__(self, "m", m)
        for a, b in zip(m[:-2], m[1:-1]):
            if a < b:
                raise ValueError(f"m must be non-increasing: {m}")
        if kp >= 2 and m[-2] < abs(m[-1]):
            raise ValueError(f"need m_{{k'-1}} >= |m_k'|: {m}")
        if kp and 2 * kp < self.n and m[-1] < 0:
            raise ValueError(f"last entry must be >= 0 when 2k' < n: {m}")

    @property
    def kp(self) -> int:
        return len(self.m)


def _gram_dets(frame: np.ndarray, upto: int) -> np.ndarray:
    """``det(A(l) A(l)^t)`` for ``l = 1..upto``."""
    rows = frame[0 : 2 * upto : 2] + 1j * frame[1 : 2 * upto : 2]
    return np.array([np.linalg.det(rows[:l] @ rows[:l].T) for l in range(1, upto + 1)])


def strichartz_vector(spec: HighestWeightSpec, frame) -> complex:
    """Highest weight vector evaluated at ``span(frame)``.

    For ``k > n/2`` the function is evaluated on the orthogonal complement.
    """
    f = np.asarray(frame, dtype=float).reshape(spec.n, -1)
    if f.shape[1] != spec.k:
        raise ValueError(f"frame has {f.shape[1]} columns, spec expects k={spec.k}")
    if 2 * spec.k > spec.n:
        f = complement_batch(f[None])[0]
    m, kp = spec.m, spec.kp
    if kp == 0:
        return 1.0 + 0j
    dets = _gram_dets(f, kp)
    out = 1.0 + 0j
    if m[-1] >= 0:
        nxt = m[1:] + (0,)
        for d, a, b in zip(dets, m, nxt):
            out *= d ** (a - b)
        return complex(out)
    for l in range(kp - 1):
        out *= dets[l] ** (m[l] - abs(m[l + 1]))
    return complex(out * np.conj(dets[-1]) ** abs(m[-1]))


def obstruction_frame(n: int, k: int, phi: float) -> np.ndarray:
    """The test family: ``<cos φ e1 + sin φ e4> ⊕ <e3, e5, …, e_{2k-1}>`` (n >= 4), ``<cos φ e1 + sin φ e3>`` (n = 3)."""
    if n < 3:
        raise ValueError("family needs n >= 3")
    if n == 3:
        if k != 1:
            raise ValueError("for n = 3 the family is a line (k = 1)")
        v = np.zeros((3, 1))
        v[0, 0], v[2, 0] = math.cos(phi), math.sin(phi)
        return v
    if not 1 <= k <= n // 2:
        raise ValueError(f"family needs 1 <= k <= n/2, got (n, k) = ({n}, {k})")
    f = np.zeros((n, k))
    f[0, 0], f[3, 0] = math.cos(phi), math.sin(phi)
    for j in range(1, k):
        f[2 * j, j] = 1.0  # e3, e5, …
    return f


@dataclass(frozen=True)
class QuadraticFit:
    coefficients: np.ndarray
    residual: float
    rank: int
    condition: float


def fit_quadratic(frames, values) -> QuadraticFit:
    """Least squares fit by quadratic Plücker monomials (SVD-based, so rank deficiency is fine)."""
    frames = np.asarray(frames, dtype=float)
    y = np.asarray(values)
    M = quadratic_monomials(plucker_coords(frames))
    if M.shape[0] < 2:
        raise ValueError("need at least two samples")
    coef, _, rank, s = np.linalg.lstsq(M, y, rcond=RANK_RTOL)
    resid = y - M @ coef
    rms = float(np.sqrt(np.mean(np.abs(resid) ** 2)))
    nz = s[s > RANK_RTOL * s[0]] if s.size else s
    cond = float(nz[0] / nz[-1]) if nz.size else math.inf
    return QuadraticFit(coef, rms, int(rank), cond)


@dataclass(frozen=True)
class ObstructionResult:
    n: int
    k: int
    m1: int
    max_error: float
    fit_residual: float


def obstruction_family_check(n: int, k: int, m1: int, phi_grid=None) -> ObstructionResult:
    """Compare the highest weight vector with ``cos^{2 m1} φ`` on the family, and try a quadratic fit.

    Uses ``m = (m1, 0, …, 0)``.
    """
    phis = np.linspace(0.0, math.pi, 100, endpoint=False) if phi_grid is None else np.asarray(phi_grid, float)
    spec = HighestWeightSpec((m1,), n, k)
    frames = np.array([obstruction_frame(n, k, p) for p in phis])
    vals = np.array([strichartz_vector(spec, f) for f in frames])
    err = float(np.max(np.abs(vals - np.cos(phis) ** (2 * m1))))
    fit = fit_quadratic(frames, vals.real)
    return ObstructionResult(n, k, m1, err, fit.residual)
