"""Gaussian quadratures and the FBR <-> DVR transformation machinery.

The transformation matrix is

    T[k, j] = N_j * sqrt(w_k) * p_j(q_k),

rows indexed by quadrature nodes q_k, columns by orthonormal polynomials
p_j (N_j is the L2 normalizer).  Nodes and weights come from the symmetric
tridiagonal Jacobi-matrix eigenproblem (Golub-Welsch), which is stable and
reuses the dense eigensolver.  Gaussian exactness makes T exactly
orthogonal: T^T T = I up to roundoff.

Columns of T satisfy a three-term recursion inherited from the polynomial
recurrence,

    T[p, q+2] = (A_q + B_q x_p) T[p, q+1] + C_q T[p, q],

which the column-reconstruction oracle exploits: the matrix is split into
segments of F columns, the two middle columns of each segment are loaded
directly, and the rest are rebuilt by scaled ascending/descending
recursions whose running coefficients fold the C_q factors into a final
per-column division by gamma_q.
"""

from __future__ import annotations

import csv as _csv
import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import ConfigError, RangeError, ShapeError
from .qrom import CostReport

__all__ = [
    "QuadratureKind",
    "Quadrature",
    "DvrTransform",
    "RecursionCoeffs",
    "gauss_quadrature",
    "build_transform",
    "fbr_potential",
    "recursion_coeffs",
    "recursion_columns",
    "dvr_oracle_cost",
    "segment_init_cost",
    "export_matrix_csv",
]


class QuadratureKind(enum.Enum):
    HERMITE = "hermite"
    LEGENDRE = "legendre"


def _jacobi_recurrence(kind: QuadratureKind, n: int):
    """Orthonormal-recurrence data (alpha, beta, mu0) for the family.

    beta[j] multiplies p_{j} in  beta[j+1] p_{j+1} = (x - alpha[j]) p_j -
    beta[j] p_{j-1}; mu0 is the weight-function total mass.
    """
    j = np.arange(n, dtype=np.float64)
    if kind is QuadratureKind.HERMITE:
        alpha = np.zeros(n)
        beta = np.sqrt(j / 2.0)
        mu0 = math.sqrt(math.pi)
    elif kind is QuadratureKind.LEGENDRE:
        alpha = np.zeros(n)
        beta = j / np.sqrt(4.0 * j * j - 1.0, where=j > 0, out=np.ones(n))
        beta[0] = 0.0
        mu0 = 2.0
    else:
        raise ConfigError(f"unsupported quadrature kind {kind!r}")
    return alpha, beta, mu0


@dataclass(frozen=True)
class Quadrature:
    """Gaussian nodes and weights; exact for polynomials up to degree 2n-1."""

    kind: QuadratureKind
    n: int
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=np.float64)
        weights = np.asarray(self.weights, dtype=np.float64)
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)
        if nodes.shape != (self.n,) or weights.shape != (self.n,):
            raise ShapeError("nodes/weights must both have length n")
        if np.any(np.diff(nodes) <= 0):
            raise RangeError("nodes must be strictly increasing")
        if np.any(weights <= 0):
            raise RangeError("weights must be positive")


def gauss_quadrature(kind: QuadratureKind | str, n: int) -> Quadrature:
    """Golub-Welsch nodes for Hermite or Legendre weight.

    Nodes are the Jacobi-matrix eigenvalues; weights use the Christoffel
    form w_k = 1 / sum_j p_j(q_k)**2, which stays positive where the raw
    eigenvector first components underflow (large-n Hermite).
    """
    if isinstance(kind, str):
        try:
            kind = QuadratureKind(kind.lower())
        except ValueError as exc:
            raise ConfigError(f"unsupported quadrature kind {kind!r}") from exc
    if n < 1:
        raise RangeError(f"point count must be >= 1, got {n}")
    alpha, beta, _ = _jacobi_recurrence(kind, n)
    if n == 1:
        nodes = np.array([alpha[0]])
    else:
        nodes = eigh_tridiagonal(alpha, beta[1:], eigvals_only=True)
    polys = _orthonormal_polynomials(kind, n, nodes)
    weights = 1.0 / np.sum(polys * polys, axis=0)
    return Quadrature(kind=kind, n=n, nodes=nodes, weights=weights)


def _orthonormal_polynomials(kind: QuadratureKind, n: int, x: np.ndarray) -> np.ndarray:
    """Rows j = 0..n-1 of the orthonormal polynomials evaluated at x."""
    alpha, beta, mu0 = _jacobi_recurrence(kind, n + 1)
    out = np.empty((n, x.shape[0]), dtype=np.float64)
    out[0] = 1.0 / math.sqrt(mu0)
    if n > 1:
        out[1] = (x - alpha[0]) * out[0] / beta[1]
    for j in range(2, n):
        out[j] = ((x - alpha[j - 1]) * out[j - 1] - beta[j - 1] * out[j - 2]) / beta[j]
    return out


@dataclass(frozen=True)
class DvrTransform:
    """Orthogonal FBR-to-DVR matrix T with its quadrature and normalizers."""

    n: int
    matrix: np.ndarray = field(repr=False)
    quadrature: Quadrature = None
    normalizers: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=np.float64)
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)
        if matrix.shape != (self.n, self.n):
            raise ShapeError(f"expected a {self.n}x{self.n} matrix")
        gram_err = np.max(np.abs(matrix.T @ matrix - np.eye(self.n)))
        if gram_err > 1e-10:
            raise RangeError(f"T^T T deviates from identity by {gram_err:.3e}")


def build_transform(q: Quadrature) -> DvrTransform:
    """T[k, j] = N_j sqrt(w_k) p_j(q_k); orthogonal by Gaussian exactness.

    The stored normalizers are 1/||p_j|| relative to the monic family,
    i.e. the accumulated 1/beta products the orthonormal recurrence folds
    into its values.
    """
    polys = _orthonormal_polynomials(q.kind, q.n, q.nodes)
    matrix = np.sqrt(q.weights)[:, None] * polys.T
    _, beta, mu0 = _jacobi_recurrence(q.kind, q.n)
    normalizers = np.empty(q.n)
    normalizers[0] = 1.0 / math.sqrt(mu0)
    for j in range(1, q.n):
        normalizers[j] = normalizers[j - 1] / beta[j]
    return DvrTransform(n=q.n, matrix=matrix, quadrature=q, normalizers=normalizers)


def fbr_potential(t: DvrTransform, v_grid: np.ndarray) -> np.ndarray:
    """Quadrature representation T^T diag(v) T of a grid-sampled potential."""
    v = np.asarray(v_grid, dtype=np.float64)
    if v.shape != (t.n,):
        raise ShapeError(f"expected {t.n} grid values, got shape {v.shape}")
    m = t.matrix
    out = m.T @ (v[:, None] * m)
    return 0.5 * (out + out.T)


@dataclass(frozen=True)
class RecursionCoeffs:
    """Per-column recursion data for one (family, n, F) segmentation.

    a_col, b_col, c_col are the raw coefficients of T[p, q+2] =
    (A_q + B_q x_p) T[p, q+1] + C_q T[p, q] (index q = 0..n-3).  a_scaled,
    b_scaled, gamma hold the folded ascending/descending variants; gamma is
    exactly 1 on the two midpoint columns of every segment.
    """

    kind: QuadratureKind
    n: int
    segment: int
    a_col: np.ndarray = field(repr=False)
    b_col: np.ndarray = field(repr=False)
    c_col: np.ndarray = field(repr=False)
    a_scaled: np.ndarray = field(repr=False)
    b_scaled: np.ndarray = field(repr=False)
    gamma: np.ndarray = field(repr=False)


def recursion_coeffs(kind: QuadratureKind | str, n: int, segment: int) -> RecursionCoeffs:
    """Raw and scaled three-term coefficients for the segmented recursion."""
    if isinstance(kind, str):
        kind = QuadratureKind(kind.lower())
    if segment < 2 or segment & (segment - 1) or n % segment:
        raise ShapeError(f"segment size {segment} must be a power of two dividing {n}")
    alpha, beta, _ = _jacobi_recurrence(kind, n + 1)
    # p_{q+2} = (x - alpha_{q+1}) / beta_{q+2} p_{q+1} - beta_{q+1}/beta_{q+2} p_q
    qs = np.arange(n - 2) if n > 2 else np.arange(0)
    a_col = -alpha[qs + 1] / beta[qs + 2]
    b_col = 1.0 / beta[qs + 2]
    c_col = -beta[qs + 1] / beta[qs + 2]

    a_scaled = np.zeros(n)
    b_scaled = np.zeros(n)
    gamma = np.ones(n)
    half = segment // 2
    for seg_start in range(0, n, segment):
        mid_hi = seg_start + half      # gamma = 1 here
        mid_lo = mid_hi - 1            # and here
        for q in range(mid_hi + 1, seg_start + segment):
            c = c_col[q - 2]
            gamma[q] = gamma[q - 2] / c
            ratio = gamma[q] / gamma[q - 1]
            a_scaled[q] = ratio * a_col[q - 2]
            b_scaled[q] = ratio * b_col[q - 2]
        for q in range(mid_lo - 1, seg_start - 1, -1):
            c = c_col[q]
            gamma[q] = gamma[q + 2] * c
            ratio = gamma[q + 2] / gamma[q + 1]
            a_scaled[q] = -ratio * a_col[q]
            b_scaled[q] = -ratio * b_col[q]
    return RecursionCoeffs(
        kind=kind,
        n=n,
        segment=segment,
        a_col=a_col,
        b_col=b_col,
        c_col=c_col,
        a_scaled=a_scaled,
        b_scaled=b_scaled,
        gamma=gamma,
    )


def recursion_columns(
    coeffs: RecursionCoeffs,
    init_columns: dict,
    nodes: np.ndarray,
) -> np.ndarray:
    """Rebuild the full T matrix from the per-segment midpoint columns.

    init_columns maps column index -> column vector for the two midpoint
    columns of every segment (q = s*F + F/2 - 1 and s*F + F/2).  Ascending
    and descending scaled recursions fill the rest; every column is divided
    by its gamma at the end.  Matches build_transform to ~1e-8 for n <= 32
    (roundoff grows mildly with n through the recurrence).
    """
    n, segment = coeffs.n, coeffs.segment
    x = np.asarray(nodes, dtype=np.float64)
    if x.shape != (n,):
        raise ShapeError(f"expected {n} nodes, got shape {x.shape}")
    half = segment // 2
    scaled = np.zeros((n, n), dtype=np.float64)
    for seg_start in range(0, n, segment):
        mid_hi = seg_start + half
        mid_lo = mid_hi - 1
        for q in (mid_lo, mid_hi):
            if q not in init_columns:
                raise ShapeError(f"missing init column {q}")
            scaled[:, q] = np.asarray(init_columns[q], dtype=np.float64)
        for q in range(mid_hi + 1, seg_start + segment):
            scaled[:, q] = (
                coeffs.a_scaled[q] + coeffs.b_scaled[q] * x
            ) * scaled[:, q - 1] + scaled[:, q - 2]
        for q in range(mid_lo - 1, seg_start - 1, -1):
            scaled[:, q] = (
                coeffs.a_scaled[q] + coeffs.b_scaled[q] * x
            ) * scaled[:, q + 1] + scaled[:, q + 2]
    return scaled / coeffs.gamma[None, :]


def midpoint_columns(t: DvrTransform, segment: int) -> dict:
    """The two middle columns per segment, as the init lookup would load."""
    if segment < 2 or segment & (segment - 1) or t.n % segment:
        raise ShapeError(f"segment size {segment} must be a power of two dividing {t.n}")
    cols = {}
    half = segment // 2
    for seg_start in range(0, t.n, segment):
        for q in (seg_start + half - 1, seg_start + half):
            cols[q] = t.matrix[:, q].copy()
    return cols


def dvr_oracle_cost(ns, d: int, qrom_coster) -> CostReport:
    """Cost of the DVR transformation unitary over D coordinates.

    Evaluates 2 * sum_i floor(pi sqrt(n_i) / 4) * C_Q(n_i**2, d) where the
    pluggable qrom_coster(N, d) -> CostReport prices loading N table entries
    of d bits (SELECT-SWAP model, WH synthesis, or a stub).  Gate counts
    add; the qubit count is the widest single lookup.
    """
    t = cnot = clifford = t_depth = 0
    qubits = 0
    for n_i in ns:
        if n_i < 1:
            raise RangeError(f"basis size must be positive, got {n_i}")
        reps = 2 * math.floor(math.pi * math.sqrt(n_i) / 4.0)
        sub = qrom_coster(n_i * n_i, d)
        t += reps * sub.t_count
        cnot += reps * sub.cnot_count
        clifford += reps * sub.clifford_count
        t_depth += reps * sub.t_depth
        qubits = max(qubits, sub.qubit_count)
    return CostReport.assemble(t, cnot, clifford, qubits, t_depth)


def segment_init_cost(n: int, m: int, segment: int, method: str = "select-swap") -> float:
    """T-cost model of the midpoint-column lookup feeding the recursion.

    select-swap: 2 N sqrt(m) / sqrt(F) + sqrt(N m); select: N**2 / F + N.
    """
    if method == "select-swap":
        return 2.0 * n * math.sqrt(m) / math.sqrt(segment) + math.sqrt(n * m)
    if method == "select":
        return n * n / segment + n
    raise ConfigError(f"unknown init method {method!r}")


def export_matrix_csv(matrix: np.ndarray, path) -> None:
    """Row-major CSV with 17 significant digits."""
    arr = np.atleast_2d(np.asarray(matrix, dtype=np.float64))
    with open(path, "w", newline="") as fh:
        writer = _csv.writer(fh)
        for row in arr:
            writer.writerow([f"{v:.17g}" for v in row])
