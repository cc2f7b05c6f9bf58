"""Asymptotic structure of quantum channels.

Fixed points, invariant states, the faithful / irreducible / primitive
classification, the peripheral (phase) projector, Perron-Frobenius
projections of irreducible channels, their converse construction, the
decomposition of a faithful channel into irreducible components, and the
direct-sum-of-primitives test that characterizes eventually entanglement
breaking faithful channels.
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .channel import Channel, Flag, adjoint, spectrum
from .errors import (
    ConvergenceError,
    DimensionError,
    HypothesisError,
    InvalidChannelError,
    NonCommutingError,
    ParameterError,
    SpectralSeparationError,
)
from .linalg import (
    DEFAULT_TOL,
    as_matrix,
    check_positive_definite,
    eig_general,
    eigvals_hermitian,
    gamma_superop,
    hermitian_basis,
    hermitize,
    lambda_min,
    schatten_norm,
    spectral_projector,
    unvec,
    vec,
)


# ---------------------------------------------------------------- helpers


def _compression_superop(v):
    """Transfer matrix of ``X -> V^H X V`` for an isometry ``V`` (d x r)."""
    return np.kron(v.T, v.conj().T)


def _embedding_superop(v):
    """Transfer matrix of ``X -> V X V^H``."""
    return np.kron(v.conj(), v)


def restrict(phi, v):
    """Compression ``X -> V^H Phi(V X V^H) V`` of ``phi`` to the range of ``v``.

    A channel when the range of ``v`` is invariant.
    """
    v = as_matrix(v)
    t = _compression_superop(v) @ phi.transfer @ _embedding_superop(v)
    return Channel(t)


def invariance_residual(phi, v):
    """Norm of the part of ``Phi(Q X Q)`` leaving ``Q B(H) Q``, ``Q = V V^H``."""
    q = v @ v.conj().T
    qq = np.kron(q.conj(), q)
    n = qq.shape[0]
    return float(np.linalg.norm((np.eye(n) - qq) @ phi.transfer @ qq, 2))


def _range_isometry(p, tol=0.5):
    w, u = np.linalg.eigh(hermitize(p))
    return u[:, w > tol]


def _gap_guard(ev, tol):
    mod = np.abs(ev)
    bad = (mod > 1.0 - tol.gap) & (mod < 1.0 - tol.periph)
    if np.any(bad):
        raise SpectralSeparationError(
            f"eigenvalue moduli {np.sort(mod[bad])} lie between the peripheral threshold "
            f"1-{tol.periph:g} and the gap guard 1-{tol.gap:g}"
        )
    dist = np.abs(ev - 1.0)
    bad = (dist >= tol.fix) & (dist < tol.gap)
    if np.any(bad):
        raise SpectralSeparationError(f"eigenvalues {ev[bad]} are not separated from 1")


def _periph_select(tol):
    return lambda x: abs(x) >= 1.0 - tol.periph


def _fixed_select(tol):
    return lambda x: abs(x - 1.0) < tol.fix


def _eig_one_count(ev, tol):
    return int(np.sum(np.abs(ev - 1.0) < tol.fix))


# ---------------------------------------------------------------- fixed points


def fixed_points(phi, tol=DEFAULT_TOL):
    """Hermitian, Hilbert-Schmidt orthonormal basis of the fixed-point space.

    Works for any Hermiticity-preserving map whose eigenvalue 1 is
    semisimple, in particular for channels and their adjoints.
    """
    d = phi.dim
    res = eig_general(phi.transfer, _fixed_select(tol))
    k = res.n_selected
    mats = [unvec(res.schur_basis[:, j], d) for j in range(k)]
    return hermitian_basis(mats, d)


def fixed_point_projector(phi, tol=DEFAULT_TOL):
    """Spectral projector of the transfer matrix onto eigenvalue 1."""
    return spectral_projector(phi.transfer, _fixed_select(tol))


def invariant_state(phi, tol=DEFAULT_TOL):
    """Invariant state of maximal support, ``P_1(I/d)`` renormalized."""
    phi.require_cptp("invariant_state")
    d = phi.dim
    p1 = fixed_point_projector(phi, tol)
    s = hermitize(unvec(p1 @ vec(np.eye(d) / d), d))
    return s / np.trace(s).real


def is_faithful_state(sigma, tol=DEFAULT_TOL):
    w = eigvals_hermitian(sigma)
    return bool(w[0] > tol.rank * w[-1])


# ---------------------------------------------------------------- data types


@dataclass(frozen=True)
class Component:
    """Irreducible component of a faithful channel.

    Attributes
    ----------
    projection : ndarray
        Orthogonal projection ``P_i`` onto the component.
    isometry : ndarray
        ``d x r_i`` isometry with ``P_i = V V^H``.
    restricted_channel : Channel
        Channel on ``r_i x r_i`` matrices obtained by compression.
    period : int
        Number of peripheral eigenvalues of the restriction.
    perron_projections : tuple of ndarray
        Cyclic projections ``p_n`` of the restriction, embedded in ``H``.
    """

    projection: np.ndarray
    isometry: np.ndarray
    restricted_channel: Channel
    period: int
    perron_projections: tuple


@dataclass(frozen=True)
class AsymptoticStructure:
    dim: int
    phase_projector: Channel
    sigma_tr: np.ndarray
    is_faithful: bool
    is_irreducible: bool
    is_primitive: bool
    invariant_state: np.ndarray
    components: tuple
    lcm_period: Optional[int]
    spectrum: object
    fixed_dimension: int

    @property
    def peripheral_eigenvalues(self):
        return self.spectrum.peripheral

    @property
    def periods(self):
        return [c.period for c in self.components]

    def refined_blocks(self):
        """Cyclic projections of all components, a resolution of the identity."""
        return [p for c in self.components for p in c.perron_projections]


@dataclass(frozen=True)
class PeripheralDecomposition:
    """``Phi = sum_n theta^n P_n + Phi_Q`` for an irreducible channel."""

    z: int
    projections: tuple
    sigma: np.ndarray
    u: np.ndarray
    phi_p: Channel
    phi_q: Channel

    @property
    def theta(self):
        return np.exp(2j * np.pi / self.z)


@dataclass(frozen=True)
class IrreducibleSpec:
    """Data of an irreducible channel: period, cyclic projections, state, transient part."""

    z: int
    projections: tuple
    sigma: np.ndarray
    phi_q: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "projections", tuple(as_matrix(p) for p in self.projections))
        object.__setattr__(self, "sigma", as_matrix(self.sigma))
        q = self.phi_q.transfer if isinstance(self.phi_q, Channel) else as_matrix(self.phi_q)
        object.__setattr__(self, "phi_q", q)


@dataclass(frozen=True)
class DirectSumCheck:
    """Outcome of the direct-sum-of-primitives test.

    ``is_direct_sum`` holds when the powers of ``Phi^Z`` annihilate the
    off-diagonal blocks of the refined projections (the restriction is
    nilpotent) and every diagonal block of ``Phi^(d^2 Z)`` is primitive.
    ``offdiag_leakage`` is the norm of ``Phi^(d^2 Z)`` on the off-diagonal
    blocks and ``annihilation_power`` the first multiple of ``Z`` at which
    that norm drops below tolerance, if any.
    """

    is_direct_sum: bool
    blocks: tuple
    block_projections: tuple
    power: int
    cycle_lcm: int
    offdiag_leakage: float
    nilpotent: bool
    annihilation_power: Optional[int]
    reason: str


def _cptp_flags():
    return {"cp": Flag.VERIFIED, "tp": Flag.VERIFIED}


# ---------------------------------------------------------------- classify


def classify(phi, tol=DEFAULT_TOL, seed=0):
    """Asymptotic structure of a CPTP map.

    Raises
    ------
    SpectralSeparationError
        If the peripheral spectrum is not separated from the bulk by the
        gap guard.
    """
    phi.require_cptp("classify")
    d = phi.dim
    spec = spectrum(phi, tol)
    _gap_guard(spec.eigenvalues, tol)
    p = spectral_projector(phi.transfer, _periph_select(tol))
    pp = Channel(p)
    sigma_tr = hermitize(unvec(p @ vec(np.eye(d)), d)) / d
    sigma = invariant_state(phi, tol)
    faithful = is_faithful_state(sigma, tol)
    n_one = _eig_one_count(spec.eigenvalues, tol)
    irreducible = faithful and n_one == 1
    primitive = irreducible and len(spec.peripheral_indices) == 1
    comps = ()
    lcm = None
    if faithful:
        comps = tuple(irreducible_components(phi, tol=tol, seed=seed))
        lcm = math.lcm(*(c.period for c in comps))
    return AsymptoticStructure(
        dim=d,
        phase_projector=pp,
        sigma_tr=sigma_tr,
        is_faithful=faithful,
        is_irreducible=irreducible,
        is_primitive=primitive,
        invariant_state=sigma,
        components=comps,
        lcm_period=lcm,
        spectrum=spec,
        fixed_dimension=n_one,
    )


def _is_irreducible_quick(phi, tol):
    ev = eig_general(phi.transfer).eigenvalues
    if _eig_one_count(ev, tol) != 1:
        return False
    return is_faithful_state(invariant_state(phi, tol), tol)


def _is_primitive_quick(phi, tol):
    ev = eig_general(phi.transfer).eigenvalues
    if int(np.sum(np.abs(ev) >= 1.0 - tol.periph)) != 1:
        return False
    return _is_irreducible_quick(phi, tol)


def _cluster(w, scale):
    groups = [[0]]
    for i in range(1, len(w)):
        if w[i] - w[i - 1] > 1e-7 * scale:
            groups.append([i])
        else:
            groups[-1].append(i)
    return groups


def irreducible_components(phi, tol=DEFAULT_TOL, seed=0):
    """Decompose a faithful channel into irreducible components.

    Minimal projections of the fixed-point algebra of the adjoint map are
    found as spectral projections of a random Hermitian element of that
    algebra. Each candidate is checked to be invariant and re-split until
    every restriction is irreducible.
    """
    phi.require_cptp("irreducible_components")
    d = phi.dim
    if not is_faithful_state(invariant_state(phi, tol), tol):
        raise InvalidChannelError("irreducible_components requires a faithful channel")
    rng = np.random.default_rng(seed)
    isos = _split(phi, np.eye(d, dtype=complex), rng, tol, budget=[d + 1])
    comps = []
    for v in isos:
        sub = restrict(phi, v)
        sub = Channel(sub.transfer, flags=_cptp_flags())
        if v.shape[1] == 1:
            z, perron = 1, (v @ v.conj().T,)
        else:
            dec = peripheral_decomposition(sub, tol)
            z = dec.z
            perron = tuple(v @ p @ v.conj().T for p in dec.projections)
        comps.append(Component(v @ v.conj().T, v, sub, z, perron))
    total = sum(c.projection for c in comps)
    if np.max(np.abs(total - np.eye(d))) > 1e-8:
        raise ConvergenceError("component projections do not resolve the identity")
    return comps


def _split(phi, v, rng, tol, budget):
    r = v.shape[1]
    if r == 1:
        return [v]
    sub = restrict(phi, v)
    alg = fixed_points(adjoint(sub), tol)
    if len(alg) <= 1:
        return [v]
    for _ in range(3):
        if budget[0] <= 0:
            raise ConvergenceError("component refinement did not terminate")
        budget[0] -= 1
        y = sum(c * b for c, b in zip(rng.standard_normal(len(alg)), alg))
        w, u = np.linalg.eigh(hermitize(y))
        groups = _cluster(w, max(1.0, w[-1] - w[0]))
        if len(groups) > 1:
            break
    else:
        raise ConvergenceError("fixed-point algebra probe found no splitting")
    out = []
    for g in groups:
        vg = v @ u[:, g]
        res = invariance_residual(phi, vg)
        if res > 1e-8:
            raise ConvergenceError(f"candidate component is not invariant (residual {res:.2e})")
        out.extend(_split(phi, vg, rng, tol, budget))
    return out


# ---------------------------------------------------------------- irreducible channels


def _phase_part_transfer(u, sigma, z):
    """Transfer matrix of ``sum_n theta^n Tr[u^-n X] u^n sigma``."""
    theta = np.exp(2j * np.pi / z)
    t = 0
    un = np.eye(u.shape[0], dtype=complex)
    for n in range(z):
        t = t + theta ** n * np.outer(vec(un @ sigma), vec(un).conj())
        un = un @ u
    return t


def _projections_from_unitary(u, z):
    theta = np.exp(2j * np.pi / z)
    powers = [np.linalg.matrix_power(u, m) for m in range(z)]
    projs = []
    for k in range(z):
        pk = sum(theta ** (-k * m) * powers[m] for m in range(z)) / z
        v = _range_isometry(pk)
        projs.append(v @ v.conj().T)
    return projs


def peripheral_decomposition(phi, tol=DEFAULT_TOL):
    """Perron-Frobenius data of an irreducible channel.

    Returns
    -------
    PeripheralDecomposition
        Period ``z``, cyclic projections ``p_0..p_{z-1}`` (with
        ``Phi(p_j X p_k) = p_{j-1} Phi(X) p_{k-1}``), invariant state,
        the unitary ``u = sum_k theta^k p_k``, the peripheral part and the
        transient part.
    """
    phi.require_cptp("peripheral_decomposition")
    d = phi.dim
    ev = eig_general(phi.transfer).eigenvalues
    _gap_guard(ev, tol)
    sigma = invariant_state(phi, tol)
    if _eig_one_count(ev, tol) != 1 or not is_faithful_state(sigma, tol):
        raise InvalidChannelError("peripheral_decomposition requires an irreducible channel")
    periph = ev[np.abs(ev) >= 1.0 - tol.periph]
    z = len(periph)
    frac = np.sort(np.mod(np.angle(periph) * z / (2 * np.pi), z))
    if np.max(np.abs(frac - np.round(frac))) * 2 * np.pi / z > tol.angle or len(
        set(np.round(frac).astype(int) % z)
    ) != z:
        raise SpectralSeparationError(f"peripheral eigenvalues {periph} are not the {z}-th roots of unity")
    if z == 1:
        u = np.eye(d, dtype=complex)
        projs = [np.eye(d, dtype=complex)]
    else:
        theta = np.exp(2j * np.pi / z)
        a = phi.transfer.conj().T - np.conj(theta) * np.eye(d * d)
        _, _, vh = np.linalg.svd(a)
        v = unvec(vh[-1].conj(), d)
        w_u, s, w_vh = np.linalg.svd(v)
        if np.max(np.abs(s / s.mean() - 1.0)) > 1e-6:
            raise ConvergenceError("adjoint peripheral eigenvector is not proportional to a unitary")
        uu = w_u @ w_vh
        mu = np.linalg.eigvals(uu)
        cz = np.mean(mu ** z)
        c = np.exp(1j * np.angle(cz) / z)
        uu = uu / c
        ang = np.angle(np.linalg.eigvals(uu)) * z / (2 * np.pi)
        if np.max(np.abs(ang - np.round(ang))) * 2 * np.pi / z > tol.angle:
            raise ConvergenceError("eigenphases of u do not snap onto the roots of unity")
        projs = _projections_from_unitary(uu, z)
        if np.max(np.abs(sum(projs) - np.eye(d))) > 1e-8:
            raise ConvergenceError("cyclic projections do not resolve the identity")
        u = sum(theta ** k * p for k, p in enumerate(projs))
    tp = _phase_part_transfer(u, sigma, z)
    phi_p = Channel(tp)
    phi_q = Channel(phi.transfer - tp)
    return PeripheralDecomposition(z, tuple(projs), sigma, u, phi_p, phi_q)


def overlap_matrix(z, projections, k):
    """``L_k = sum_n p_{n-k} (x) p_n`` with indices mod ``z``."""
    return sum(np.kron(projections[(n - k) % z], projections[n]) for n in range(z))


def _validate_spec(spec, tol):
    z = int(spec.z)
    projs = spec.projections
    sigma = spec.sigma
    d = sigma.shape[0]
    if not 1 <= z <= d or len(projs) != z:
        raise HypothesisError("1", f"period z={z} must lie in 1..{d} and match {len(projs)} projections")
    eye = np.eye(d)
    for p in projs:
        if p.shape != (d, d):
            raise DimensionError("projection size does not match sigma")
        r = max(np.max(np.abs(p - p.conj().T)), np.max(np.abs(p @ p - p)))
        if r > 1e-9:
            raise HypothesisError("2", "p_n is not an orthogonal projection", r)
    r = np.max(np.abs(sum(projs) - eye))
    if r > 1e-9:
        raise HypothesisError("2", "projections do not sum to the identity", r)
    if np.max(np.abs(sigma - sigma.conj().T)) > 1e-9 or abs(np.trace(sigma) - 1) > 1e-9:
        raise HypothesisError("3", "sigma is not a state")
    w = eigvals_hermitian(sigma)
    if w[0] <= tol.rank * w[-1]:
        raise HypothesisError("3", "sigma is not faithful", w[0])
    for n, p in enumerate(projs):
        r = np.max(np.abs(sigma @ p - p @ sigma))
        if r > 1e-9:
            raise NonCommutingError("3", f"sigma does not commute with p_{n}", r)
        r = abs(np.trace(sigma @ p) - 1.0 / z)
        if r > 1e-9:
            raise HypothesisError("3", f"Tr[sigma p_{n}] != 1/z", r)
    q = spec.phi_q
    if q.shape != (d * d, d * d):
        raise DimensionError("phi_q has the wrong size")
    spr = float(np.max(np.abs(np.linalg.eigvals(q)))) if d > 0 else 0.0
    if spr >= 1.0 - tol.periph:
        raise HypothesisError("4a", f"spr(Phi_Q) = {spr:.6g} is not < 1", spr)
    from .channel import transfer_to_choi

    jq = transfer_to_choi(q)
    if np.max(np.abs(jq - jq.conj().T)) > 1e-9:
        raise HypothesisError("4b", "J(Phi_Q) is not Hermitian")
    lower = z * np.kron(sigma, eye) @ overlap_matrix(z, projs, 1)
    m = hermitize(jq + lower)
    lm = lambda_min(m)
    if lm < -tol.psd * max(1.0, np.linalg.norm(m, 2)):
        raise HypothesisError("4b", f"J(Phi_Q) + z(sigma x I)L_1 has eigenvalue {lm:.3e}", -lm)
    for n, p in enumerate(projs):
        r1 = np.max(np.abs(unvec(q @ vec(sigma @ p), d)))
        r2 = np.max(np.abs(unvec(q.conj().T @ vec(p), d)))
        if max(r1, r2) > 1e-9:
            raise HypothesisError("4c", f"Phi_Q does not annihilate sigma p_{n} and p_{n}", max(r1, r2))


def build_irreducible(spec, tol=DEFAULT_TOL):
    """Irreducible channel ``sum_n theta^n P_n + Phi_Q`` from validated data.

    Raises
    ------
    HypothesisError
        Naming the violated hypothesis (``"1"``, ``"2"``, ``"3"``, ``"4a"``,
        ``"4b"`` or ``"4c"``).
    """
    _validate_spec(spec, tol)
    z = int(spec.z)
    theta = np.exp(2j * np.pi / z)
    u = sum(theta ** k * p for k, p in enumerate(spec.projections))
    t = _phase_part_transfer(u, spec.sigma, z) + spec.phi_q
    phi = Channel(t, tol=tol)
    phi.require_cptp("build_irreducible")
    return phi


def period2_spec(lam, sigma=None, p0=None, tol=DEFAULT_TOL):
    """Period-2 irreducible data with a transient part coupling ``e_0`` and ``f_0``.

    ``e_i`` and ``f_i`` are eigenbases of ``sigma`` on the ranges of ``p0``
    and ``p1 = I - p0``. The transient part sends ``|e_0><f_0|`` to
    ``lam |f_0><e_0|`` and ``|f_0><e_0|`` to ``conj(lam) |e_0><f_0|`` and
    kills the other matrix units, so it never vanishes under iteration.
    """
    sigma = np.eye(2, dtype=complex) / 2 if sigma is None else as_matrix(sigma)
    d = sigma.shape[0]
    if p0 is None:
        p0 = np.zeros((d, d), dtype=complex)
        p0[0, 0] = 1.0
    p0 = as_matrix(p0)
    p1 = np.eye(d) - p0
    s = check_positive_definite(sigma, tol)
    lmin = lambda_min(s)
    bound = min(1.0, np.sqrt(2.0) * lmin)
    if not 0.0 < abs(lam) < bound:
        raise ParameterError(f"|lambda| = {abs(lam):.6g} must lie in (0, min(1, sqrt(2) lambda_min(sigma)) = {bound:.6g})")
    v0, v1 = _range_isometry(p0), _range_isometry(p1)
    if v0.shape[1] == 0 or v1.shape[1] == 0:
        raise HypothesisError("2", "both cyclic projections must be nonzero")
    _, e = np.linalg.eigh(hermitize(v0.conj().T @ s @ v0))
    _, f = np.linalg.eigh(hermitize(v1.conj().T @ s @ v1))
    e0 = v0 @ e[:, 0]
    f0 = v1 @ f[:, 0]
    ef = np.outer(e0, f0.conj())
    fe = np.outer(f0, e0.conj())
    q = lam * np.outer(vec(fe), vec(ef).conj()) + np.conj(lam) * np.outer(vec(ef), vec(fe).conj())
    return IrreducibleSpec(2, (p0, p1), sigma, q)


# ---------------------------------------------------------------- direct sums


def _is_nilpotent(m, rtol):
    """Nilpotency by the strictly decreasing rank sequence of powers."""
    n = m.shape[0]
    if n == 0:
        return True
    scale = max(1.0, np.linalg.norm(m, 2))
    prev = n
    pw = np.eye(n, dtype=complex)
    for k in range(1, n + 1):
        pw = pw @ m
        s = np.linalg.svd(pw, compute_uv=False)
        r = int(np.sum(s > rtol * scale ** k))
        if r == 0:
            return True
        if r == prev:
            return False
        prev = r
    return False


def direct_sum_of_primitive_check(phi, structure=None, tol=DEFAULT_TOL, seed=0):
    """Test whether ``Phi^(d^2 Z)`` is a direct sum of primitive channels.

    The off-diagonal blocks of the refined projections form a space
    invariant under ``Phi^Z``; ``Phi^(d^2 Z)`` annihilates it exactly when
    the restriction of ``Phi^Z`` is nilpotent, which is decided from the rank
    sequence of its powers rather than from the size of the entries.
    """
    if structure is None:
        structure = classify(phi, tol, seed)
    if structure.dim != phi.dim:
        raise DimensionError("structure does not belong to this channel")
    d = phi.dim
    if not structure.is_faithful:
        return DirectSumCheck(False, (), (), 0, 0, float("nan"), False, None, "channel is not faithful")
    z = structure.lcm_period
    n_pow = d * d * z
    blocks = structure.refined_blocks()
    isos = [_range_isometry(p) for p in blocks]
    cols = []
    for a, va in enumerate(isos):
        for b, vb in enumerate(isos):
            if a == b:
                continue
            for i in range(va.shape[1]):
                for j in range(vb.shape[1]):
                    cols.append(vec(np.outer(va[:, i], vb[:, j].conj())))
    tz = np.linalg.matrix_power(phi.transfer, z)
    tn = np.linalg.matrix_power(tz, d * d)
    reason = ""
    if cols:
        b_off = np.array(cols).T
        m = b_off.conj().T @ tz @ b_off
        inv_res = float(np.linalg.norm(tz @ b_off - b_off @ m, 2))
        leak = float(np.linalg.norm(tn @ b_off, 2))
        nil = _is_nilpotent(m, tol.offdiag)
        ann = None
        pw = np.eye(m.shape[0], dtype=complex)
        for j in range(1, d * d + 1):
            pw = pw @ m
            if np.linalg.norm(pw, 2) <= tol.offdiag:
                ann = j * z
                break
        if inv_res > 1e-8:
            nil = False
            reason = f"off-diagonal block space is not invariant (residual {inv_res:.2e})"
        elif not nil:
            reason = "Phi^Z does not annihilate the off-diagonal blocks under iteration"
    else:
        leak, nil, ann = 0.0, True, z
    chans = []
    prim = True
    for v in isos:
        t = _compression_superop(v) @ tn @ _embedding_superop(v)
        ch = Channel(t)
        chans.append(ch)
        if v.shape[1] > 1 and not (ch.is_cptp and _is_primitive_quick(ch, tol)):
            prim = False
    if nil and not prim:
        reason = "a diagonal block is not primitive"
    ok = bool(nil and prim)
    return DirectSumCheck(ok, tuple(chans), tuple(blocks), n_pow, z, leak, bool(nil), ann, reason or "ok")


# ---------------------------------------------------------------- normalization and regularization


def similarity_normalize(phi_cp, x, sigma, tol=DEFAULT_TOL):
    """Normalize a CP map with positive eigenvectors into a faithful channel.

    Returns ``(1/spr) Gamma_x o Phi o Gamma_x^-1`` with
    ``Gamma_x(Y) = x^(1/2) Y x^(1/2)``, given ``Phi^*(x) = spr x`` and
    ``Phi(sigma) = spr sigma``.
    """
    if phi_cp.is_cp is not Flag.VERIFIED:
        raise InvalidChannelError("similarity_normalize needs a completely positive map")
    x = check_positive_definite(x, tol, "x")
    sigma = check_positive_definite(sigma, tol, "sigma")
    d = phi_cp.dim
    spr = float(np.max(np.abs(np.linalg.eigvals(phi_cp.transfer))))
    if spr <= 0.0:
        raise InvalidChannelError("spectral radius is zero")
    rx = np.linalg.norm(unvec(phi_cp.transfer.conj().T @ vec(x), d) - spr * x) / (spr * np.linalg.norm(x))
    rs = np.linalg.norm(unvec(phi_cp.transfer @ vec(sigma), d) - spr * sigma) / (spr * np.linalg.norm(sigma))
    if max(rx, rs) > 1e-8:
        raise InvalidChannelError(f"eigenvector residuals {rx:.2e}, {rs:.2e} exceed 1e-8")
    t = gamma_superop(x, 1.0, tol) @ phi_cp.transfer @ gamma_superop(x, -1.0, tol) / spr
    return Channel(t, tol=tol)


def regularize(phi, eps, stage="faithful", tol=DEFAULT_TOL):
    """Mix toward replacement channels.

    ``stage="faithful"`` returns ``(1-eps) Phi + eps Psi_{I/d}``;
    ``stage="eeb"`` further mixes that with ``Psi_sigma`` for its invariant
    state ``sigma``.
    """
    phi.require_cptp("regularize")
    if not 0.0 < eps < 1.0:
        raise ParameterError(f"eps={eps} outside (0, 1)")
    d = phi.dim
    e = vec(np.eye(d))
    t1 = (1.0 - eps) * phi.transfer + eps * np.outer(e / d, e)
    phi1 = Channel(t1, tol=tol)
    if stage == "faithful":
        return phi1
    if stage != "eeb":
        raise ValueError(f"unknown stage {stage!r}")
    s = invariant_state(phi1, tol)
    t2 = (1.0 - eps) * t1 + eps * np.outer(vec(s), e)
    return Channel(t2, tol=tol)
