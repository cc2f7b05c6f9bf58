"""Dense complex linear algebra kernel.

Tensor operations, decompositions, norms and the sigma-weighted geometry
used throughout the package. Decompositions delegate to LAPACK through
numpy and scipy; this module adds validation, tolerance handling and the
reshaping conventions.

Conventions
-----------
Matrices are ``numpy.ndarray`` objects of dtype ``complex128``.
Vectorization is column stacking, ``vec(X) = X.reshape(-1, order="F")``,
so that ``vec(A X B) = (B.T kron A) vec(X)``.
"""

from dataclasses import dataclass, replace
from typing import Callable, NamedTuple, Optional

import numpy as np
import scipy.linalg

from .errors import (
    ConvergenceError,
    DimensionError,
    NotHermitianError,
    NotPositiveError,
    NotAStateError,
    SpectralSeparationError,
)


@dataclass(frozen=True)
class Tolerances:
    """Numerical tolerances, passed explicitly to every routine that needs one.

    Attributes
    ----------
    herm : float
        Relative Hermiticity tolerance, ``||M - M^H|| <= herm * ||M||``.
    psd : float
        Relative positivity tolerance on smallest eigenvalues.
    recon : float
        Relative reconstruction residual allowed for decompositions.
    tp : float
        Absolute tolerance for trace preservation and unitality.
    periph : float
        Eigenvalues with modulus ``>= 1 - periph`` are peripheral.
    gap : float
        Spectral gap guard. A modulus in ``(1 - gap, 1 - periph)`` is an error.
    fix : float
        Eigenvalues within ``fix`` of 1 count as fixed.
    rank : float
        Relative threshold on the smallest eigenvalue for faithfulness.
    angle : float
        Angular tolerance when snapping phases to roots of unity.
    offdiag : float
        Tolerance for block annihilation and off-block leakage.
    contraction : float
        Margin below 1 required of a strictly contracting norm.
    entropy_floor : float
        Eigenvalues below this value contribute nothing to entropies.
    clip : float
        Eigenvalue clipping level when forming powers of positive matrices.
    """

    herm: float = 1e-10
    psd: float = 1e-9
    recon: float = 1e-10
    tp: float = 1e-9
    periph: float = 1e-8
    gap: float = 1e-6
    fix: float = 1e-8
    rank: float = 1e-9
    angle: float = 1e-6
    offdiag: float = 1e-9
    contraction: float = 1e-10
    entropy_floor: float = 1e-14
    clip: float = 1e-12

    def with_(self, **changes):
        """Return a copy with some fields replaced."""
        return replace(self, **changes)

    def as_dict(self):
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


DEFAULT_TOL = Tolerances()


@dataclass(frozen=True)
class DimSplit:
    """Factor dimensions of a bipartite space ``H_A (x) H_B``."""

    dim_a: int
    dim_b: int

    def __post_init__(self):
        if int(self.dim_a) < 1 or int(self.dim_b) < 1:
            raise DimensionError(f"invalid split {self.dim_a}x{self.dim_b}")

    @property
    def total(self):
        return self.dim_a * self.dim_b


def as_matrix(m):
    """Convert input to a 2-d complex array."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise DimensionError(f"expected a matrix, got shape {a.shape}")
    return a


def _square(m):
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    return a


def _as_split(split):
    if isinstance(split, DimSplit):
        return split
    return DimSplit(*split)


def _which(which):
    if which in ("A", "a", 0):
        return 0
    if which in ("B", "b", 1):
        return 1
    raise ValueError(f"subsystem selector must be 'A' or 'B', got {which!r}")


def vec(x):
    """Column-stacking vectorization."""
    return as_matrix(x).reshape(-1, order="F")


def unvec(v, d=None):
    """Inverse of :func:`vec` for a length ``d**2`` vector."""
    v = np.asarray(v, dtype=complex).ravel()
    if d is None:
        d = int(round(np.sqrt(v.size)))
    if d * d != v.size:
        raise DimensionError(f"vector of length {v.size} is not a vectorized square matrix")
    return v.reshape((d, d), order="F")


def dagger(m):
    return np.conj(np.swapaxes(m, -1, -2))


def kron(a, b):
    """Kronecker product, entry ``(i*p + k, j*q + l) = a[i, j] * b[k, l]``."""
    return np.kron(as_matrix(a), as_matrix(b))


def partial_trace(m, split, which):
    """Trace out one factor of a bipartite operator.

    Parameters
    ----------
    m : array_like
        Square matrix on ``H_A (x) H_B``.
    split : DimSplit or tuple of int
    which : {"A", "B"}
        The factor that is traced out.
    """
    split = _as_split(split)
    a = _square(m)
    if a.shape[0] != split.total:
        raise DimensionError(f"matrix of size {a.shape[0]} does not match split {split}")
    t = a.reshape(split.dim_a, split.dim_b, split.dim_a, split.dim_b)
    if _which(which) == 0:
        return np.einsum("ijik->jk", t)
    return np.einsum("ijkj->ik", t)


def partial_trace_multi(m, dims, keep):
    """Reduced operator on the factors listed in ``keep`` (in increasing order)."""
    a = _square(m)
    dims = [int(x) for x in dims]
    n = len(dims)
    if a.shape[0] != int(np.prod(dims)):
        raise DimensionError(f"matrix of size {a.shape[0]} does not match dims {dims}")
    keep = sorted(set(keep))
    t = a.reshape(dims + dims)
    letters = "abcdefghijklmnopqrstuvwxyz"
    rows = list(letters[:n])
    cols = list(letters[n:2 * n])
    for i in range(n):
        if i not in keep:
            cols[i] = rows[i]
    out = "".join(rows[i] for i in keep) + "".join(cols[i] for i in keep)
    r = np.einsum("".join(rows) + "".join(cols) + "->" + out, t)
    dk = int(np.prod([dims[i] for i in keep])) if keep else 1
    return r.reshape(dk, dk)


def partial_transpose(m, split, which):
    """Transpose one factor of a bipartite operator in the computational basis."""
    split = _as_split(split)
    a = _square(m)
    if a.shape[0] != split.total:
        raise DimensionError(f"matrix of size {a.shape[0]} does not match split {split}")
    t = a.reshape(split.dim_a, split.dim_b, split.dim_a, split.dim_b)
    if _which(which) == 0:
        t = t.transpose(2, 1, 0, 3)
    else:
        t = t.transpose(0, 3, 2, 1)
    return t.reshape(split.total, split.total)


def hermitian_residual(m):
    """Relative anti-Hermitian part ``||M - M^H||_inf / ||M||_inf``."""
    a = _square(m)
    scale = np.linalg.norm(a, 2)
    if scale == 0.0:
        return 0.0
    return float(np.linalg.norm(a - a.conj().T, 2) / scale)


def is_hermitian(m, tol=DEFAULT_TOL):
    return hermitian_residual(m) <= tol.herm


def hermitize(m):
    a = _square(m)
    return 0.5 * (a + a.conj().T)


def eig_hermitian(m, tol=DEFAULT_TOL):
    """Eigendecomposition of a Hermitian matrix.

    Returns
    -------
    w : ndarray
        Ascending real eigenvalues.
    v : ndarray
        Unitary matrix of eigenvectors (columns).

    Raises
    ------
    NotHermitianError
        If ``m`` is not Hermitian within ``tol.herm``.
    """
    a = _square(m)
    res = hermitian_residual(a)
    if res > tol.herm:
        raise NotHermitianError(f"relative anti-Hermitian residual {res:.3e}")
    try:
        w, v = np.linalg.eigh(hermitize(a))
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(str(exc)) from exc
    return w, v


def eigvals_hermitian(m):
    """Ascending eigenvalues of the Hermitian part of ``m``."""
    return np.linalg.eigvalsh(hermitize(m))


class SchurResult(NamedTuple):
    eigenvalues: np.ndarray
    schur_form: np.ndarray
    schur_basis: np.ndarray
    n_selected: int


def eig_general(m, select: Optional[Callable[[complex], bool]] = None):
    """Complex Schur decomposition ``m = Z T Z^H`` with optional reordering.

    Parameters
    ----------
    m : array_like
        Square matrix.
    select : callable, optional
        Predicate on eigenvalues. Selected eigenvalues are moved to the
        leading block of the Schur form.

    Returns
    -------
    SchurResult
        ``eigenvalues`` is the diagonal of ``schur_form`` in its final
        order and ``n_selected`` the size of the leading block (0 when no
        predicate is given).
    """
    a = _square(m)
    try:
        if select is None:
            t, z = scipy.linalg.schur(a, output="complex")
            sdim = 0
        else:
            t, z, sdim = scipy.linalg.schur(a, output="complex", sort=lambda x: bool(select(x)))
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise ConvergenceError(f"Schur decomposition failed: {exc}") from exc
    return SchurResult(np.diag(t).copy(), t, z, int(sdim))


def spectral_projector(m, select: Callable[[complex], bool]):
    """Spectral projector onto the invariant subspace of the selected eigenvalues.

    The projector is taken along the complementary invariant subspace. It is
    obtained from an ordered Schur form by block diagonalization, solving
    ``T11 Y - Y T22 = -T12``.
    """
    a = _square(m)
    n = a.shape[0]
    res = eig_general(a, select)
    k = res.n_selected
    if k == 0:
        return np.zeros_like(a)
    if k == n:
        return np.eye(n, dtype=complex)
    t, z = res.schur_form, res.schur_basis
    t11, t12, t22 = t[:k, :k], t[:k, k:], t[k:, k:]
    try:
        y = scipy.linalg.solve_sylvester(t11, -t22, -t12)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SpectralSeparationError(f"Sylvester solve failed: {exc}") from exc
    block = np.zeros((n, n), dtype=complex)
    block[:k, :k] = np.eye(k)
    block[:k, k:] = -y
    return z @ block @ z.conj().T


def svd(m):
    """Singular value decomposition ``m = U diag(s) V^H``, ``s`` descending."""
    a = as_matrix(m)
    try:
        u, s, vh = np.linalg.svd(a)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(str(exc)) from exc
    return s, u, vh.conj().T


def schatten_norm(m, p):
    """Schatten norm of order 1, 2 or infinity."""
    a = as_matrix(m)
    if p == 1:
        return float(np.sum(np.linalg.svd(a, compute_uv=False)))
    if p == 2:
        return float(np.linalg.norm(a, "fro"))
    if p in (np.inf, "inf", float("inf")):
        if a.size == 0:
            return 0.0
        return float(np.linalg.norm(a, 2))
    raise ValueError(f"unsupported Schatten order {p!r}")


def lambda_min(m):
    """Smallest eigenvalue of the Hermitian part."""
    return float(eigvals_hermitian(m)[0])


def lambda_max(m):
    return float(eigvals_hermitian(m)[-1])


def check_positive_definite(sigma, tol=DEFAULT_TOL, name="sigma"):
    """Validate a Hermitian positive definite matrix and return it Hermitized."""
    s = _square(sigma)
    if hermitian_residual(s) > max(tol.herm, 1e-8):
        raise NotHermitianError(f"{name} is not Hermitian")
    w = eigvals_hermitian(s)
    if w[0] <= tol.clip * max(1.0, abs(w[-1])):
        raise NotPositiveError(f"{name} is not positive definite (lambda_min = {w[0]:.3e})")
    return hermitize(s)


def check_state(rho, tol=DEFAULT_TOL, name="rho"):
    """Validate a density matrix and return it Hermitized."""
    r = _square(rho)
    if hermitian_residual(r) > max(tol.herm, 1e-8):
        raise NotAStateError(f"{name} is not Hermitian")
    r = hermitize(r)
    tr = np.trace(r).real
    if abs(tr - 1.0) > 1e-8:
        raise NotAStateError(f"{name} has trace {tr:.12g}")
    w = eigvals_hermitian(r)
    if w[0] < -tol.psd * max(1.0, w[-1]):
        raise NotAStateError(f"{name} has negative eigenvalue {w[0]:.3e}")
    return r


def psd_power(m, power, tol=DEFAULT_TOL):
    """Power of a positive semidefinite matrix via Hermitian eigendecomposition.

    Eigenvalues below ``tol.clip`` (relative to the largest) are clipped to
    zero. Negative powers require a positive definite input.
    """
    w, v = np.linalg.eigh(hermitize(m))
    cut = tol.clip * max(1.0, abs(w[-1]))
    if power < 0:
        if w[0] <= cut:
            raise NotPositiveError("negative power of a singular positive matrix")
        wp = w ** power
    elif power == 0:
        wp = np.ones_like(w)
    else:
        wp = np.where(w > cut, np.clip(w, 0.0, None), 0.0) ** power
    return (v * wp) @ v.conj().T


def gamma_map(sigma, x, power=1.0, tol=DEFAULT_TOL):
    """``sigma^(power/2) x sigma^(power/2)``.

    ``power = 1`` is the weighting map, ``power = -1`` its inverse and
    ``power = 1/2`` the isometry from the sigma-weighted Hilbert-Schmidt
    space onto the ordinary one.
    """
    s = check_positive_definite(sigma, tol)
    h = psd_power(s, power / 2.0, tol)
    return h @ as_matrix(x) @ h


def gamma_superop(sigma, power=1.0, tol=DEFAULT_TOL):
    """Transfer matrix of ``x -> gamma_map(sigma, x, power)``."""
    s = check_positive_definite(sigma, tol)
    h = psd_power(s, power / 2.0, tol)
    return np.kron(h.T, h)


def weighted_inner(sigma, x, y, tol=DEFAULT_TOL):
    """Weighted inner product ``Tr(sigma^(1/2) x^H sigma^(1/2) y)``."""
    s = check_positive_definite(sigma, tol)
    h = psd_power(s, 0.5, tol)
    return complex(np.trace(h @ as_matrix(x).conj().T @ h @ as_matrix(y)))


def weighted_norm(sigma, x, tol=DEFAULT_TOL):
    """Weighted 2-norm, the square root of ``weighted_inner(sigma, x, x)``."""
    return float(np.sqrt(max(weighted_inner(sigma, x, x, tol).real, 0.0)))


def entropy(rho, tol=DEFAULT_TOL):
    """Von Neumann entropy in nats, ignoring eigenvalues below ``tol.entropy_floor``."""
    w = eigvals_hermitian(rho)
    w = w[w > tol.entropy_floor]
    return float(-np.sum(w * np.log(w)))


def orthonormal_columns(a, rtol=1e-9):
    """Orthonormal basis for the column space of ``a`` by SVD rank truncation."""
    a = as_matrix(a)
    if a.shape[1] == 0:
        return a
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return a[:, :0]
    r = int(np.sum(s > rtol * s[0]))
    return u[:, :r]


def hermitian_basis(mats, d, rtol=1e-9):
    """Hilbert-Schmidt orthonormal Hermitian basis spanning a *-closed set.

    Parameters
    ----------
    mats : sequence of (d, d) arrays
        Spanning set of a space closed under adjoints.
    d : int
        Matrix size.
    """
    parts = []
    for x in mats:
        x = np.asarray(x, dtype=complex)
        parts.append(0.5 * (x + x.conj().T))
        parts.append(0.5j * (x.conj().T - x))
    if not parts:
        return []
    # Hermitian matrices form a real vector space; embed them as real vectors.
    real_rows = np.array([np.concatenate([p.real.ravel(), p.imag.ravel()]) for p in parts]).T
    u, s, _ = np.linalg.svd(real_rows, full_matrices=False)
    if s[0] == 0.0:
        return []
    r = int(np.sum(s > rtol * s[0]))
    basis = []
    for j in range(r):
        col = u[:, j]
        h = col[: d * d].reshape(d, d) + 1j * col[d * d:].reshape(d, d)
        basis.append(hermitize(h))
    return basis
