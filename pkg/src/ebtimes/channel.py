"""Quantum channels as transfer matrices.

A :class:`Channel` stores the matrix of a linear map on ``d x d`` matrices
in the column-stacked computational basis, so that the Kraus form
``X -> sum_k K X K^H`` has transfer matrix ``sum_k conj(K) kron K``.
The Choi matrix uses the output (x) input ordering,
``J = sum_ij Phi(|i><j|) kron |i><j|``, with trace ``d`` for trace-preserving
maps. Separability-facing code uses the normalized ``J / d``.

The same class carries maps that are not channels (spectral projectors,
the peripheral and transient parts of a channel); the tri-state flags say
which channel properties hold.
"""

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, InvalidChannelError, ParameterError, SingularChannelError
from .linalg import (
    DEFAULT_TOL,
    as_matrix,
    eig_general,
    eigvals_hermitian,
    hermitian_residual,
    lambda_min,
    partial_trace,
    schatten_norm,
    unvec,
    vec,
)

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (PAULI_I, PAULI_X, PAULI_Y, PAULI_Z)


class Flag(enum.Enum):
    VERIFIED = "verified"
    FAILED = "failed"
    UNCHECKED = "unchecked"

    def __bool__(self):
        return self is Flag.VERIFIED


def transfer_to_choi(t):
    """Reshuffle a transfer matrix into the output (x) input Choi matrix."""
    t = as_matrix(t)
    d = int(round(np.sqrt(t.shape[0])))
    if d * d != t.shape[0] or t.shape[0] != t.shape[1]:
        raise DimensionError(f"transfer matrix has shape {t.shape}")
    # t[a + d*b, i + d*j] = Phi(|i><j|)[a, b]  ->  J[a*d + i, b*d + j]
    return t.reshape(d, d, d, d).transpose(1, 3, 0, 2).reshape(d * d, d * d)


def choi_to_transfer(j):
    """Inverse of :func:`transfer_to_choi`."""
    j = as_matrix(j)
    d = int(round(np.sqrt(j.shape[0])))
    if d * d != j.shape[0] or j.shape[0] != j.shape[1]:
        raise DimensionError(f"Choi matrix has shape {j.shape}")
    return j.reshape(d, d, d, d).transpose(2, 0, 3, 1).reshape(d * d, d * d)


def _cp_flag(j, tol):
    scale = max(np.linalg.norm(j, 2), 1e-300)
    if hermitian_residual(j) > max(tol.herm, 1e-9):
        return Flag.FAILED, np.inf
    lmin = lambda_min(j)
    res = max(0.0, -lmin) / scale
    return (Flag.VERIFIED if lmin >= -tol.psd * scale else Flag.FAILED), res


def _tp_flag(j, d, tol):
    res = float(np.max(np.abs(partial_trace(j, (d, d), "A") - np.eye(d))))
    return (Flag.VERIFIED if res <= tol.tp else Flag.FAILED), res


def _unital_flag(t, d, tol):
    res = float(np.max(np.abs(unvec(t @ vec(np.eye(d)), d) - np.eye(d))))
    return (Flag.VERIFIED if res <= tol.tp else Flag.FAILED), res


class Channel:
    """Linear map on ``d x d`` matrices.

    Parameters
    ----------
    transfer : array_like
        ``d**2 x d**2`` transfer matrix (column-stacking convention).
    flags : dict, optional
        Known values for ``"cp"``, ``"tp"`` and ``"unital"``. Missing flags
        are verified eagerly.
    tol : Tolerances
        Tolerances used for flag verification.
    origin : str
        Representation the channel was built from (for reporting).
    """

    __slots__ = ("_t", "_j", "_flags", "_residuals", "origin")

    def __init__(self, transfer, flags=None, tol=DEFAULT_TOL, origin="transfer"):
        t = np.array(transfer, dtype=complex)
        d = int(round(np.sqrt(t.shape[0]))) if t.ndim == 2 else 0
        if t.ndim != 2 or t.shape[0] != t.shape[1] or d * d != t.shape[0] or d == 0:
            raise DimensionError(f"transfer matrix must be d^2 x d^2, got shape {t.shape}")
        j = transfer_to_choi(t)
        t.flags.writeable = False
        j.flags.writeable = False
        self._t = t
        self._j = j
        self.origin = origin
        flags = dict(flags or {})
        res = {}
        if "cp" not in flags:
            flags["cp"], res["cp"] = _cp_flag(j, tol)
        if "tp" not in flags:
            flags["tp"], res["tp"] = _tp_flag(j, d, tol)
        if "unital" not in flags:
            flags["unital"], res["unital"] = _unital_flag(t, d, tol)
        self._flags = {k: Flag(v) for k, v in flags.items()}
        self._residuals = res

    @property
    def dim(self):
        return int(round(np.sqrt(self._t.shape[0])))

    @property
    def transfer(self):
        return self._t

    @property
    def choi(self):
        """Choi matrix with trace ``d`` for trace-preserving maps."""
        return self._j

    @property
    def choi_state(self):
        """Normalized Choi matrix ``J / d``."""
        return self._j / self.dim

    @property
    def is_cp(self):
        return self._flags["cp"]

    @property
    def is_tp(self):
        return self._flags["tp"]

    @property
    def is_unital(self):
        return self._flags["unital"]

    @property
    def is_cptp(self):
        return bool(self.is_cp) and bool(self.is_tp)

    @property
    def residuals(self):
        """Residuals measured during flag verification."""
        return dict(self._residuals)

    def flags(self):
        return dict(self._flags)

    def __call__(self, x):
        x = as_matrix(x)
        d = self.dim
        if x.shape != (d, d):
            raise DimensionError(f"input of shape {x.shape} for a channel on {d}x{d} matrices")
        return unvec(self._t @ vec(x), d)

    apply = __call__

    def __repr__(self):
        f = ", ".join(f"{k}={v.value}" for k, v in self._flags.items())
        return f"Channel(dim={self.dim}, {f})"

    def require_cptp(self, what="operation"):
        if not self.is_cptp:
            raise InvalidChannelError(
                f"{what} requires a CPTP channel (cp={self.is_cp.value}, tp={self.is_tp.value}, "
                f"residuals={self._residuals})"
            )


def _joint(*flags):
    if all(f is Flag.VERIFIED for f in flags):
        return Flag.VERIFIED
    return None


def _propagated(*chans):
    out = {}
    for key in ("cp", "tp", "unital"):
        f = _joint(*(c.flags()[key] for c in chans))
        if f is not None:
            out[key] = f
    return out


def from_kraus(kraus_ops, tol=DEFAULT_TOL):
    """Channel ``X -> sum_k K_k X K_k^H``."""
    ops = [as_matrix(k) for k in kraus_ops]
    if not ops:
        raise DimensionError("empty Kraus list")
    d = ops[0].shape[0]
    if any(k.shape != (d, d) for k in ops):
        raise DimensionError("Kraus operators must all be d x d")
    t = sum(np.kron(k.conj(), k) for k in ops)
    return Channel(t, flags={"cp": Flag.VERIFIED}, tol=tol, origin="kraus")


def from_choi(j, tol=DEFAULT_TOL):
    return Channel(choi_to_transfer(j), tol=tol, origin="choi")


def from_transfer(t, tol=DEFAULT_TOL):
    return Channel(t, tol=tol, origin="transfer")


def to_choi(phi):
    """Choi matrix ``J(Phi)``, output factor first."""
    return phi.choi


def identity(d):
    return Channel(np.eye(d * d), flags={k: Flag.VERIFIED for k in ("cp", "tp", "unital")})


def unitary_channel(u, tol=DEFAULT_TOL):
    return from_kraus([u], tol)


def compose(phi, psi):
    """The composition ``phi o psi`` (``psi`` is applied first)."""
    if phi.dim != psi.dim:
        raise DimensionError(f"cannot compose maps on dimensions {phi.dim} and {psi.dim}")
    return Channel(phi.transfer @ psi.transfer, flags=_propagated(phi, psi))


def power(phi, n):
    """``phi`` composed with itself ``n`` times; ``n = 0`` gives the identity."""
    n = int(n)
    if n < 0:
        raise ValueError("negative powers are not channels; use map_norm(..., 'two_to_two_inverse')")
    if n == 0:
        return identity(phi.dim)
    return Channel(np.linalg.matrix_power(phi.transfer, n), flags=_propagated(phi))


def adjoint(phi):
    """Hilbert-Schmidt adjoint; CP is inherited, TP and unitality swap."""
    f = phi.flags()
    flags = {}
    if f["cp"] is Flag.VERIFIED:
        flags["cp"] = Flag.VERIFIED
    if f["tp"] is Flag.VERIFIED:
        flags["unital"] = Flag.VERIFIED
    if f["unital"] is Flag.VERIFIED:
        flags["tp"] = Flag.VERIFIED
    return Channel(phi.transfer.conj().T, flags=flags)


def tensor(phi, psi):
    """``phi (x) psi`` acting on ``H_A (x) H_B`` with ``phi`` on the first factor."""
    da, db = phi.dim, psi.dim
    ta = phi.transfer.reshape(da, da, da, da)
    tb = psi.transfer.reshape(db, db, db, db)
    t8 = np.einsum("baji,BAJI->bBaAjJiI", ta, tb)
    n = (da * db) ** 2
    return Channel(t8.reshape(n, n), flags=_propagated(phi, psi))


def linear_combination(coeffs, chans):
    """``sum_k c_k phi_k``; flags are verified afresh."""
    t = sum(c * ch.transfer for c, ch in zip(coeffs, chans))
    return Channel(t)


@dataclass(frozen=True)
class Spectrum:
    """Spectral data of a transfer matrix.

    Eigenvalues are sorted by decreasing modulus.
    """

    eigenvalues: np.ndarray
    peripheral_indices: tuple
    spectral_radius: float
    determinant: complex
    singular_values: np.ndarray

    @property
    def peripheral(self):
        return self.eigenvalues[list(self.peripheral_indices)]


def spectrum(phi, tol=DEFAULT_TOL):
    ev = eig_general(phi.transfer).eigenvalues
    order = np.lexsort((np.angle(ev), -np.round(np.abs(ev), 12)))
    ev = ev[order]
    mod = np.abs(ev)
    periph = tuple(int(k) for k in np.nonzero(mod >= 1.0 - tol.periph)[0])
    sv = np.linalg.svd(phi.transfer, compute_uv=False)
    return Spectrum(
        eigenvalues=ev,
        peripheral_indices=periph,
        spectral_radius=float(mod.max()),
        determinant=complex(np.prod(ev)),
        singular_values=sv,
    )


def map_norm(phi, kind):
    """Norms of a map.

    Parameters
    ----------
    kind : {"hs", "trace_of_transfer", "two_to_two_inverse"}
        ``hs`` is the Schatten-2 norm of the transfer matrix (equal to that
        of the Choi matrix); ``trace_of_transfer`` its Schatten-1 norm (the
        realignment norm of the Choi matrix); ``two_to_two_inverse`` the
        largest singular value of the inverse transfer matrix.
    """
    if kind == "hs":
        return schatten_norm(phi.transfer, 2)
    if kind == "trace_of_transfer":
        return schatten_norm(phi.transfer, 1)
    if kind == "two_to_two_inverse":
        s = np.linalg.svd(phi.transfer, compute_uv=False)
        if s[-1] <= 1e-14 * max(s[0], 1.0):
            raise SingularChannelError("transfer matrix is singular")
        return float(1.0 / s[-1])
    raise ValueError(f"unknown norm kind {kind!r}")


# ---------------------------------------------------------------- gallery


def point(tau, tol=DEFAULT_TOL):
    """Replacement channel ``X -> Tr(X) tau``."""
    tau = as_matrix(tau)
    d = tau.shape[0]
    w = eigvals_hermitian(tau)
    if hermitian_residual(tau) > 1e-9 or w[0] < -tol.psd or abs(np.trace(tau) - 1) > 1e-9:
        raise ParameterError("point channel needs a density matrix")
    t = np.outer(vec(tau), vec(np.eye(d)).conj())
    return Channel(t, tol=tol)


def depolarizing(d, p, tol=DEFAULT_TOL):
    """``rho -> p rho + (1 - p) Tr(rho) I/d`` for ``0 <= p <= 1``."""
    d = int(d)
    if d < 1:
        raise ParameterError("dimension must be positive")
    if not 0.0 <= p <= 1.0:
        raise ParameterError(f"depolarizing parameter p={p} outside [0, 1]")
    e = vec(np.eye(d))
    t = p * np.eye(d * d) + (1.0 - p) / d * np.outer(e, e)
    return Channel(t, tol=tol)


def completely_depolarizing(d, tol=DEFAULT_TOL):
    return depolarizing(d, 0.0, tol)


def transfer_from_action(action, d):
    """Transfer matrix of a linear map given by its action on matrices."""
    t = np.zeros((d * d, d * d), dtype=complex)
    for col in range(d * d):
        e = np.zeros(d * d, dtype=complex)
        e[col] = 1.0
        t[:, col] = vec(action(unvec(e, d)))
    return t


def qubit_nilpotent(tol=DEFAULT_TOL):
    """Unital qubit channel with ``I -> I``, ``X, Y -> 0`` and ``Z -> X``.

    Its square is the completely depolarizing channel although the
    channel itself is not strictly contractive off the identity.
    """
    images = {0: PAULI_I, 1: 0 * PAULI_I, 2: 0 * PAULI_I, 3: PAULI_X}
    t = sum(np.outer(vec(images[k]), vec(PAULIS[k]).conj()) for k in range(4)) / 2.0
    return Channel(t, tol=tol)


def cycle_mask(d, eps):
    """Positive Hadamard mask for :func:`hadamard_cycle`.

    Ones on the leading ``(d-1) x (d-1)`` block and on the last diagonal
    entry, ``eps`` between the last index and all the others.
    """
    a = np.ones((d, d), dtype=complex)
    a[d - 1, : d - 1] = eps
    a[: d - 1, d - 1] = eps
    return a


def hadamard_cycle(d, eps, tol=DEFAULT_TOL):
    """``X -> U (A o X) U^H`` with the cyclic shift ``U|i> = |i+1 mod d>``.

    Diagonal matrices are permuted cyclically; coherences between the last
    index and the rest are damped by ``eps`` at each step.
    """
    d = int(d)
    if d < 2:
        raise ParameterError("hadamard_cycle needs d >= 2")
    if not 0.0 < eps < 1.0:
        raise ParameterError(f"eps={eps} outside (0, 1)")
    a = cycle_mask(d, eps)
    u = np.roll(np.eye(d), 1, axis=0)
    t = np.kron(u.conj(), u) @ np.diag(vec(a))
    return Channel(t, tol=tol)


def irreducible_period2(lam, sigma=None, p0=None, tol=DEFAULT_TOL):
    """Irreducible period-2 channel that is never entanglement breaking.

    Parameters
    ----------
    lam : float or complex
        Coupling of the transient part, ``0 < |lam| < min(1, sqrt(2) lambda_min(sigma))``.
    sigma : array_like, optional
        Invariant state. Defaults to ``I/2``.
    p0 : array_like, optional
        First cyclic projection, commuting with ``sigma`` and with
        ``Tr(sigma p0) = 1/2``. Defaults to ``|0><0|``.
    """
    from .structure import build_irreducible, period2_spec

    return build_irreducible(period2_spec(lam, sigma, p0, tol), tol)


GALLERY = {
    "depolarizing": depolarizing,
    "qubit_nilpotent": qubit_nilpotent,
    "hadamard_cycle": hadamard_cycle,
    "irreducible_period2": irreducible_period2,
    "point": point,
}


def gallery(name, **params):
    """Build a named example channel."""
    try:
        f = GALLERY[name]
    except KeyError:
        raise ParameterError(f"unknown gallery channel {name!r}; known: {sorted(GALLERY)}") from None
    return f(**params)


# ---------------------------------------------------------------- JSON


def encode_matrix(m):
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def decode_matrix(rows):
    a = np.asarray(rows, dtype=float)
    if a.ndim != 3 or a.shape[2] != 2:
        raise ValueError("matrix entries must be [re, im] pairs")
    return a[..., 0] + 1j * a[..., 1]


def to_json_dict(phi):
    """Canonical JSON object, stored as the transfer matrix."""
    return {"dim": phi.dim, "repr": "transfer", "matrices": [encode_matrix(phi.transfer)]}


def from_json_dict(obj, tol=DEFAULT_TOL):
    """Parse ``{"dim", "repr", "matrices"}``.

    Raises ``ValueError`` (or ``KeyError``/``TypeError``) on malformed
    input and :class:`DimensionError` on inconsistent sizes.
    """
    d = int(obj["dim"])
    rep = obj["repr"]
    mats = [decode_matrix(m) for m in obj["matrices"]]
    if not mats:
        raise ValueError("no matrices given")
    if rep == "kraus":
        if any(m.shape != (d, d) for m in mats):
            raise DimensionError("Kraus operators must be dim x dim")
        return from_kraus(mats, tol)
    if len(mats) != 1 or mats[0].shape != (d * d, d * d):
        raise DimensionError(f"{rep} representation needs one {d * d}x{d * d} matrix")
    if rep == "choi":
        return from_choi(mats[0], tol)
    if rep == "transfer":
        return from_transfer(mats[0], tol)
    raise ValueError(f"unknown representation {rep!r}")
