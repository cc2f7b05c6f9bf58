"""Random states, unitaries and channels for tests and experiments."""

import numpy as np

from .channel import Channel, Flag, adjoint, from_kraus
from .linalg import hermitize


def _rng(rng):
    return rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)


def ginibre(rows, cols, rng=None):
    rng = _rng(rng)
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)


def random_unitary(d, rng=None):
    """Haar-distributed unitary (QR of a Ginibre matrix with phase fix)."""
    q, r = np.linalg.qr(ginibre(d, d, rng))
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_isometry(rows, cols, rng=None):
    q, r = np.linalg.qr(ginibre(rows, cols, rng))
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_state(d, rng=None, rank=None):
    """Random density matrix ``G G^H / Tr(G G^H)`` with ``G`` of size ``d x rank``."""
    g = ginibre(d, rank or d, rng)
    rho = g @ g.conj().T
    return hermitize(rho / np.trace(rho).real)


def random_kraus(d, rank=None, rng=None):
    """Kraus operators sliced from a random ``(d r) x d`` isometry."""
    r = rank or d * d
    v = random_isometry(d * r, d, rng)
    return [v[k * d:(k + 1) * d, :] for k in range(r)]


def random_channel(d, rank=None, rng=None):
    """Random CPTP map via a Stinespring isometry of environment rank ``rank``."""
    return from_kraus(random_kraus(d, rank, rng))


def random_mixed_unitary(d, n_terms=4, rng=None, weights=None):
    rng = _rng(rng)
    w = rng.dirichlet(np.ones(n_terms)) if weights is None else np.asarray(weights, dtype=float)
    ops = [np.sqrt(wk) * random_unitary(d, rng) for wk in w]
    return from_kraus(ops)


def random_selfadjoint_unital(d, n_terms=4, rng=None):
    """Random unital channel equal to its own Hilbert-Schmidt adjoint.

    Symmetrizes a random mixed-unitary channel, ``(Psi + Psi^*)/2``.
    """
    psi = random_mixed_unitary(d, n_terms, rng)
    t = 0.5 * (psi.transfer + adjoint(psi).transfer)
    return Channel(t)


def block_diagonal_channel(blocks, rng=None):
    """Direct sum of channels on consecutive diagonal blocks.

    ``blocks`` is a list of :class:`Channel`. Off-diagonal blocks are
    annihilated.
    """
    dims = [b.dim for b in blocks]
    d = sum(dims)
    ops = []
    start = 0
    for b, db in zip(blocks, dims):
        # recover Kraus operators of each block from its Choi matrix
        w, v = np.linalg.eigh(hermitize(b.choi))
        for lam, col in zip(w, v.T):
            if lam <= 1e-13:
                continue
            k = np.sqrt(lam) * col.reshape(db, db)
            big = np.zeros((d, d), dtype=complex)
            big[start:start + db, start:start + db] = k
            ops.append(big)
        start += db
    return from_kraus(ops)


def kraus_of(phi, cutoff=1e-13):
    """Kraus operators of a CP map from the eigendecomposition of its Choi matrix."""
    d = phi.dim
    w, v = np.linalg.eigh(hermitize(phi.choi))
    return [np.sqrt(lam) * col.reshape(d, d) for lam, col in zip(w, v.T) if lam > cutoff]


def conjugate_channel(phi, u):
    """``X -> U Phi(U^H X U) U^H``, a change of basis."""
    t = np.kron(u.conj(), u) @ phi.transfer @ np.kron(u.T, u.conj().T)
    flags = {k: v for k, v in phi.flags().items() if v is Flag.VERIFIED}
    return Channel(t, flags=flags)
