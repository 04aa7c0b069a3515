"""Zero-sum symmetric games on the simplex of mixed strategies.

Payoff matrices are antisymmetric (A^T = -A) with entries in [-1, 1].
A mixed strategy is a probability vector p of length d >= 2.  Interior
Nash equilibria of these games are exactly the interior null vectors
of the payoff matrix, which is what `interior_nash` computes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ANTISYM_TOL = 1e-12
SIMPLEX_TOL = 1e-12


class GameError(ValueError):
    """Base class for game construction/validation failures."""


class NotAntisymmetric(GameError):
    pass


class EntryOutOfRange(GameError):
    pass


class BadDimension(GameError):
    pass


class EvenDimension(GameError):
    pass


class DimensionMismatch(GameError):
    pass


class NotInterior(GameError):
    pass


@dataclass(frozen=True)
class PayoffMatrix:
    """Validated payoff matrix of a zero-sum symmetric game.

    Use `validate_payoff` or one of the named constructors instead of
    instantiating directly.
    """

    a: np.ndarray
    dim: int
    antisymmetric: bool = True

    def __post_init__(self):
        self.a.setflags(write=False)


@dataclass(frozen=True)
class StepFunctionParams:
    """Cap constant c of the boundary-vanishing step function."""

    c: float

    def __post_init__(self):
        if not 0.0 < self.c < 1.0:
            raise ValueError(f"step cap c must be in (0,1), got {self.c}")


def validate_payoff(raw, *, allow_nonantisymmetric: bool = False) -> PayoffMatrix:
    """Validate a raw square array as a payoff matrix.

    Raises NotAntisymmetric, EntryOutOfRange or BadDimension.  The
    antisymmetry check can be relaxed for display-only games; every
    dynamics routine requires a strictly antisymmetric matrix.
    """
    a = np.array(raw, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise BadDimension(f"expected a square matrix, got shape {a.shape}")
    d = a.shape[0]
    if d < 2:
        raise BadDimension(f"need at least 2 strategies, got d={d}")
    if np.max(np.abs(a)) > 1.0 + ANTISYM_TOL:
        raise EntryOutOfRange(f"entries must satisfy |a| <= 1, max is {np.max(np.abs(a))}")
    skew = np.max(np.abs(a + a.T))
    antisym = skew <= ANTISYM_TOL
    if not antisym and not allow_nonantisymmetric:
        raise NotAntisymmetric(f"max |A + A^T| = {skew:.3g} exceeds {ANTISYM_TOL}")
    return PayoffMatrix(a=a, dim=d, antisymmetric=antisym)


def rps_matrix(a: float, b: float | None = None, *, strict: bool = True) -> PayoffMatrix:
    """Rock-Paper-Scissors payoff matrix with win/loss weights a, b > 0.

    Rows are (0,-a,b), (b,0,-a), (-a,b,0).  Antisymmetric iff a == b,
    which `strict` enforces (pass strict=False to allow a != b for a
    non-symmetric game object).
    """
    if b is None:
        b = a
    if not (0.0 < a <= 1.0 and 0.0 < b <= 1.0):
        raise EntryOutOfRange(f"need 0 < a,b <= 1, got a={a}, b={b}")
    m = [[0.0, -a, b], [b, 0.0, -a], [-a, b, 0.0]]
    return validate_payoff(m, allow_nonantisymmetric=not strict)


def cyclic_matrix(d: int) -> PayoffMatrix:
    """Circulant game of odd dimension d where strategies dominate cyclically.

    First row is (0, a_1, ..., a_{d-1}) with a_k = (-1)^(k-1); each row
    is the cyclic right-shift of the previous one.
    """
    if d < 3 or d % 2 == 0:
        raise EvenDimension(f"cyclic game needs odd d >= 3, got {d}")
    first = np.zeros(d)
    for k in range(1, d):
        first[k] = (-1.0) ** (k - 1)
    a = np.empty((d, d))
    for i in range(d):
        a[i] = np.roll(first, i)
    return validate_payoff(a)


def two_strategy_matrix(b: float) -> PayoffMatrix:
    """2x2 game [[0, b], [-b, 0]]; strategy 1 dominates when b > 0."""
    if abs(b) > 1.0:
        raise EntryOutOfRange(f"|b| must be <= 1, got {b}")
    return validate_payoff([[0.0, b], [-b, 0.0]])


def as_simplex_point(raw, tol: float = SIMPLEX_TOL) -> np.ndarray:
    """Validate raw coordinates as a point of the simplex."""
    p = np.asarray(raw, dtype=float)
    if p.ndim != 1 or p.size < 2:
        raise BadDimension(f"simplex point must be a vector of length >= 2, got shape {p.shape}")
    if np.min(p) < -tol:
        raise BadDimension(f"negative coordinate {np.min(p)}")
    if abs(p.sum() - 1.0) > tol:
        raise BadDimension(f"coordinates sum to {p.sum()}, not 1")
    return p


def h_eval(p, params: StepFunctionParams) -> float:
    """Boundary-vanishing step size: min(prod_i p_i, c).

    Zero exactly when some coordinate vanishes, capped at c on the
    interior plateau.
    """
    return float(min(np.prod(p), params.c))


def sample_pure(p, zeta: float) -> int:
    """Index of the pure strategy selected by inversion sampling.

    Returns the index i with sum(p[:i]) <= zeta < sum(p[:i+1]), using
    half-open intervals so zero-probability strategies are never drawn.
    Rounding residue in the cumulative sums is absorbed by the last
    strategy, making this total on [0, 1).
    """
    cum = np.cumsum(p)
    i = int(np.searchsorted(cum, zeta, side="right"))
    return min(i, len(cum) - 1)


def payoff(p, q, matrix: PayoffMatrix) -> float:
    """Expected payoff p^T A q of mixed strategy p against q."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != (matrix.dim,) or q.shape != (matrix.dim,):
        raise DimensionMismatch(
            f"strategy shapes {p.shape}, {q.shape} do not match game dimension {matrix.dim}"
        )
    return float(p @ matrix.a @ q)


@dataclass(frozen=True)
class NashSearchResult:
    """Interior equilibrium search outcome.

    `point` is None when no interior null vector exists among the null
    basis; `null_dim` reports the numerical null-space dimension so a
    degenerate (dim > 1) game is never resolved silently.
    """

    point: np.ndarray | None
    null_dim: int


def interior_nash(matrix: PayoffMatrix, tol: float = 1e-10) -> NashSearchResult:
    """Search the null space of A for an interior equilibrium.

    Singular values below tol * ||A||_2 count as zero.  Each null basis
    vector is normalized to unit coordinate sum and returned if all its
    coordinates exceed tol; with a multidimensional null space only the
    basis vectors themselves are inspected and the multiplicity is
    reported in the result.
    """
    a = matrix.a
    _, svals, vt = np.linalg.svd(a)
    smax = svals[0] if svals.size else 0.0
    null_mask = svals <= tol * max(smax, 1.0) if smax > 0 else np.ones_like(svals, dtype=bool)
    null_dim = int(null_mask.sum())
    for row in vt[null_mask]:
        total = row.sum()
        if abs(total) < tol:
            continue
        cand = row / total
        if np.all(cand > tol):
            return NashSearchResult(point=cand, null_dim=null_dim)
    return NashSearchResult(point=None, null_dim=null_dim)


def random_interior_null_game(d: int, rng: np.random.Generator,
                              scale: float = 0.8) -> tuple[PayoffMatrix, np.ndarray]:
    """Random antisymmetric game whose null space is a known interior point.

    Draws an interior q, an orthonormal basis W of its complement and a
    random antisymmetric (d-1)-dim core K, and assembles A = W K W^T, so
    A q = 0 by construction.  For odd d the core is generically
    nonsingular and the null space is exactly span(q).  Returns (A, q)
    with entries scaled to max |a_ij| = scale.
    """
    q = 0.5 + rng.random(d)
    q = q / q.sum()
    basis = np.column_stack([q, rng.standard_normal((d, d - 1))])
    w, _ = np.linalg.qr(basis)
    w = w[:, 1:]
    k = rng.standard_normal((d - 1, d - 1))
    k = k - k.T
    a = w @ k @ w.T
    a *= scale / np.max(np.abs(a))
    a = 0.5 * (a - a.T)  # scrub float-dust asymmetry
    return validate_payoff(a), q


def is_nash(q, matrix: PayoffMatrix, tol: float = 1e-10) -> bool:
    """Whether interior point q is a Nash equilibrium, i.e. ||Aq||_inf <= tol.

    The null-space characterization only holds for interior points, so a
    point touching the boundary raises NotInterior.
    """
    q = as_simplex_point(q)
    if q.shape != (matrix.dim,):
        raise DimensionMismatch(f"point has length {q.size}, game dimension is {matrix.dim}")
    if np.min(q) <= tol:
        raise NotInterior(f"min coordinate {np.min(q)} is not > {tol}")
    return float(np.max(np.abs(matrix.a @ q))) <= tol
