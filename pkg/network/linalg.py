"""
Shared linear algebra helpers.
Exact (sympy) and floating (numpy/scipy) rank, null spaces and eigen grouping.
"""
import numpy as np
import scipy.linalg
import sympy

from config import AnalysisConfig
from network.errors import NumericalError


def is_exact(M):
    """True when M carries exact entries (sympy matrix or integer/object array)"""
    if isinstance(M, sympy.MatrixBase):
        return True
    if isinstance(M, np.ndarray):
        return M.dtype.kind in ('i', 'u', 'b', 'O')
    return False


def to_sympy(M):
    """Convert an array-like to a sympy Matrix with rational entries"""
    if isinstance(M, sympy.MatrixBase):
        return sympy.Matrix(M)
    arr = np.asarray(M)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    return sympy.Matrix(arr.shape[0], arr.shape[1],
                        lambda i, j: sympy.nsimplify(arr[i, j], rational=True))


def to_float(M):
    """Convert a sympy Matrix or array-like to a float64 ndarray"""
    if isinstance(M, sympy.MatrixBase):
        if M.rows == 0 or M.cols == 0:
            return np.zeros((M.rows, M.cols))
        return np.array(M.evalf(17).tolist(), dtype=float)
    return np.asarray(M, dtype=float)


def to_int_list(M):
    """Nested Python ints from an exact integer matrix; None if any entry is not an integer"""
    rows = []
    for row in to_sympy(M).tolist():
        out = []
        for entry in row:
            if not sympy.sympify(entry).is_integer:
                return None
            out.append(int(entry))
        rows.append(out)
    return rows


def max_abs(M):
    arr = to_float(M)
    return float(np.max(np.abs(arr))) if arr.size else 0.0


def rank_tolerance(singular_values, shape, rank_tol=None):
    """Cutoff below which singular values count as zero: max(m, n) * tol * sigma_max"""
    if rank_tol is None:
        rank_tol = AnalysisConfig.RANK_TOL
    if singular_values.size == 0:
        return 0.0
    return max(shape) * rank_tol * float(singular_values[0])


def numerical_rank(M, rank_tol=None):
    """
    Rank from singular values.

    Args:
        M: Matrix (array-like)
        rank_tol: Relative tolerance (default: AnalysisConfig.RANK_TOL)

    Returns:
        tuple: (rank, singular values)
    """
    arr = to_float(M)
    if arr.size == 0:
        return 0, np.zeros(0)
    try:
        s = np.linalg.svd(arr, compute_uv=False)
    except np.linalg.LinAlgError as e:
        raise NumericalError(f"SVD failed: {e}") from e
    tol = rank_tolerance(s, arr.shape, rank_tol)
    return int(np.sum(s > tol)), s


def matrix_rank(M, rank_tol=None):
    """Exact rank when M is exact, otherwise the numerical rank"""
    if is_exact(M):
        return int(to_sympy(M).rank())
    return numerical_rank(M, rank_tol)[0]


def null_space(M, atol=None):
    """
    Orthonormal basis of the null space of M.

    Args:
        M: Matrix (array-like)
        atol: Absolute singular value cutoff; default scales with the largest singular value

    Returns:
        ndarray: (cols, k) basis
    """
    arr = to_float(M)
    if arr.shape[0] == 0:
        return np.eye(arr.shape[1])
    if atol is None:
        return scipy.linalg.null_space(arr, rcond=max(arr.shape) * AnalysisConfig.RANK_TOL)
    u, s, vh = np.linalg.svd(arr, full_matrices=True)
    rank = int(np.sum(s > atol))
    return vh[rank:].T.copy()


def orthonormal_complement(basis):
    """Orthonormal basis of the orthogonal complement of the column space of `basis`"""
    arr = to_float(basis)
    n = arr.shape[0]
    if arr.shape[1] == 0:
        return np.eye(n)
    u, s, _ = np.linalg.svd(arr, full_matrices=True)
    rank = int(np.sum(s > rank_tolerance(s, arr.shape)))
    return normalize_columns_sign(u[:, rank:])


def normalize_sign(v, tol=1e-12):
    """Flip v so its first entry with magnitude above tol is positive"""
    v = np.asarray(v, dtype=float)
    for entry in v:
        if abs(entry) > tol:
            return v if entry > 0 else -v
    return v


def normalize_columns_sign(M):
    M = np.array(M, dtype=float)
    for j in range(M.shape[1]):
        M[:, j] = normalize_sign(M[:, j])
    return M


def symmetric_eigh(M):
    """
    Eigen-decomposition of a symmetric matrix, ascending eigenvalues.

    Raises:
        NumericalError: if the eigensolver fails to converge
    """
    arr = to_float(M)
    if arr.size == 0:
        return np.zeros(0), np.zeros((0, 0))
    try:
        return scipy.linalg.eigh(arr)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as e:
        raise NumericalError(f"Eigensolver failed: {e}") from e


def eigen_tolerance(values, eig_tol=None):
    """Zero-eigenvalue cutoff |lambda| <= eig_tol * max(1, |lambda|_max)"""
    if eig_tol is None:
        eig_tol = AnalysisConfig.EIG_TOL
    scale = float(np.max(np.abs(values))) if len(values) else 0.0
    return eig_tol * max(1.0, scale)


def group_eigenvalues(values, vectors, tol):
    """
    Cluster ascending eigenvalues whose consecutive gaps are within tol.

    Returns:
        list: (mean eigenvalue, eigenvector block) per cluster
    """
    groups = []
    start = 0
    for k in range(1, len(values) + 1):
        if k == len(values) or values[k] - values[k - 1] > tol:
            groups.append((float(np.mean(values[start:k])), vectors[:, start:k]))
            start = k
    return groups


def spectra_match(first, second, tol):
    """Multiset equality of two real spectra within tol"""
    a = np.sort(np.asarray(first, dtype=float))
    b = np.sort(np.asarray(second, dtype=float))
    return a.shape == b.shape and bool(np.all(np.abs(a - b) <= tol))
