"""Weighted geometry, discrete Poincare constants and characteristic-time bounds.

The weight is ``sigma_Tr = P(I)/d`` where ``P`` projects onto the phase
subspace. With ``Gamma(X) = sigma^(1/2) X sigma^(1/2)`` the weighted channel
is ``Phi_hat = Gamma^-1 o Phi o Gamma`` and the weighted inner product is
``<X, Y>_sigma = Tr(sigma^(1/2) X^H sigma^(1/2) Y)``. The superoperator
``W = Gamma^(1/2)`` maps the weighted space isometrically onto the ordinary
Hilbert-Schmidt space, so weighted operator norms are ordinary spectral
norms of ``W A W^-1``.

All logarithms are natural.
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .channel import Channel, Flag
from .errors import (
    ConvergenceError,
    DimensionError,
    InvalidChannelError,
    ParameterError,
)
from .linalg import (
    DEFAULT_TOL,
    as_matrix,
    check_positive_definite,
    check_state,
    eig_general,
    entropy,
    gamma_superop,
    hermitize,
    lambda_min,
    orthonormal_columns,
    partial_trace_multi,
    schatten_norm,
    unvec,
    vec,
    weighted_norm,
)
from .structure import classify, direct_sum_of_primitive_check


# ---------------------------------------------------------------- weighted maps


def hat_channel(phi, sigma_tr, inverse=False, tol=DEFAULT_TOL):
    """Weighted channel ``Gamma^-1 o Phi o Gamma``.

    With ``inverse=True`` the conjugation is reversed, ``Gamma o Phi o Gamma^-1``,
    which undoes a previous call.
    """
    s = check_positive_definite(sigma_tr, tol, "sigma_tr")
    if s.shape[0] != phi.dim:
        raise DimensionError("sigma_tr does not match the channel dimension")
    sgn = -1.0 if inverse else 1.0
    t = gamma_superop(s, -sgn, tol) @ phi.transfer @ gamma_superop(s, sgn, tol)
    return Channel(t, tol=tol)


def hat_projector(structure, tol=DEFAULT_TOL):
    """Weighted phase projector ``Gamma^-1 o P o Gamma``, equal to ``P^*``."""
    if not structure.is_faithful:
        raise InvalidChannelError("the weighted projector needs a faithful channel")
    return hat_channel(structure.phase_projector, structure.sigma_tr, tol=tol)


def _weighted_frame(structure, tol):
    """``(W, W^-1, Q)``: isometry, its inverse and the complement projector in HS geometry."""
    s = structure.sigma_tr
    w = gamma_superop(s, 0.5, tol)
    winv = gamma_superop(s, -0.5, tol)
    ph = hat_projector(structure, tol).transfer
    basis = orthonormal_columns(w @ ph @ winv, 1e-8)
    q = np.eye(w.shape[0]) - basis @ basis.conj().T
    return w, winv, q


def weighted_trace_norm(sigma, x, tol=DEFAULT_TOL):
    """``||sigma^(1/2) x sigma^(1/2)||_1``."""
    s = check_positive_definite(sigma, tol)
    d = s.shape[0]
    return schatten_norm(unvec(gamma_superop(s, 1.0, tol) @ vec(as_matrix(x)), d), 1)


# ---------------------------------------------------------------- Poincare


@dataclass(frozen=True)
class PoincareData:
    """Contraction data of ``Phi_hat^k`` off the phase space.

    Attributes
    ----------
    k : int
        Smallest tested multiple of ``cycle_lcm`` at which ``Phi_hat^k`` is a
        strict contraction on the weighted complement of the phase space.
    lambda_k : float
        Spectral gap of ``(Phi^*)^k Phi_hat^k - id`` on that complement,
        ``1 - ||Phi_hat^k restricted||^2``.
    prefactor : float
        ``sqrt(||sigma_Tr^-1||_inf)``.
    algebra_coincides_at_1 : bool
        Whether ``Phi_hat`` itself already strictly contracts.
    cycle_lcm : int
        Least common multiple of the component periods.
    norms : dict
        Tested ``k`` mapped to the restricted operator norm.
    """

    k: int
    lambda_k: float
    prefactor: float
    algebra_coincides_at_1: bool
    cycle_lcm: int
    norms: dict = field(default_factory=dict)
    sigma_tr: Optional[np.ndarray] = field(default=None, repr=False)

    def as_dict(self):
        return {
            "k": self.k,
            "lambda_k": self.lambda_k,
            "prefactor": self.prefactor,
            "algebra_coincides_at_1": self.algebra_coincides_at_1,
            "cycle_lcm": self.cycle_lcm,
            "norms": {str(k): v for k, v in self.norms.items()},
        }


def _restricted_norm(th_pow, w, winv, q):
    return float(np.linalg.norm(w @ th_pow @ winv @ q, 2))


def poincare(phi, structure=None, tol=DEFAULT_TOL, seed=0):
    """Discrete Poincare data of a faithful channel.

    ``k`` ascends through ``Z, 2Z, ..., d^2 Z`` and stops at the first power
    whose weighted restriction to the complement of the phase space has
    operator norm below ``1 - tol.contraction``.

    Raises
    ------
    InvalidChannelError
        If the channel is not faithful.
    ConvergenceError
        If no tested power contracts.
    """
    phi.require_cptp("poincare")
    if structure is None:
        structure = classify(phi, tol, seed)
    if structure.dim != phi.dim:
        raise DimensionError("structure does not belong to this channel")
    if not structure.is_faithful:
        raise InvalidChannelError("poincare needs a faithful channel")
    d = phi.dim
    z = structure.lcm_period
    w, winv, q = _weighted_frame(structure, tol)
    th = hat_channel(phi, structure.sigma_tr, tol=tol).transfer
    limit = 1.0 - tol.contraction
    s1 = _restricted_norm(th, w, winv, q)
    norms = {1: s1}
    thz = np.linalg.matrix_power(th, z)
    pw = np.eye(th.shape[0], dtype=complex)
    found = None
    for j in range(1, d * d + 1):
        pw = pw @ thz
        s = _restricted_norm(pw, w, winv, q)
        norms[j * z] = s
        if s < limit:
            found = (j * z, s)
            break
    if found is None:
        raise ConvergenceError(f"no power up to {d * d * z} contracts off the phase space")
    k, s = found
    prefactor = math.sqrt(1.0 / lambda_min(structure.sigma_tr))
    return PoincareData(k, float(1.0 - s * s), prefactor, bool(s1 < limit), int(z), norms, structure.sigma_tr)


def noncontraction_witness(phi, structure=None, tol=DEFAULT_TOL, seed=0):
    """Operator ``X`` off the phase space that ``Phi_hat`` does not contract.

    Returns ``(X, residual)`` with ``residual`` the gap between
    ``||Phi_hat(X) - Phi_hat P_hat(X)||`` and ``||X - P_hat(X)||`` in the
    weighted norm, or ``None`` when ``Phi_hat`` strictly contracts.
    """
    if structure is None:
        structure = classify(phi, tol, seed)
    w, winv, q = _weighted_frame(structure, tol)
    th = hat_channel(phi, structure.sigma_tr, tol=tol).transfer
    m = w @ th @ winv @ q
    _, s, vh = np.linalg.svd(m)
    if s[0] < 1.0 - tol.contraction:
        return None
    d = phi.dim
    x = unvec(winv @ vh[0].conj(), d)
    ph = hat_projector(structure, tol)
    sig = structure.sigma_tr
    lhs = weighted_norm(sig, unvec(th @ vec(x - ph(x)), d), tol)
    rhs = weighted_norm(sig, x - ph(x), tol)
    return x, abs(lhs - rhs)


@dataclass(frozen=True)
class ContractionDiagnostic:
    """Both sides of the weighted contraction and, for states, the trace-norm decay."""

    weighted_lhs: float
    weighted_rhs: float
    trace_lhs: Optional[float]
    trace_rhs: Optional[float]
    k: int
    n: int

    @property
    def holds(self):
        ok = self.weighted_lhs <= self.weighted_rhs + 1e-8
        if self.trace_lhs is not None:
            ok = ok and self.trace_lhs <= self.trace_rhs + 1e-8
        return ok


def _is_state(x, tol):
    try:
        check_state(x, tol)
        return True
    except ValueError:
        return False


def contraction_diagnostic(phi, structure, x, n, data=None, tol=DEFAULT_TOL):
    """Evaluate the decay inequalities at ``n`` blocks of ``k`` steps.

    Parameters
    ----------
    x : array_like
        A density matrix ``rho`` (then ``X = sigma^-1/2 rho sigma^-1/2`` is
        used on the weighted side and the trace-norm side is evaluated too)
        or an arbitrary observable ``X``.
    data : PoincareData, optional
        Computed when omitted.
    """
    if structure is None:
        structure = classify(phi, tol)
    if data is None:
        data = poincare(phi, structure, tol)
    d = phi.dim
    n = int(n)
    x = as_matrix(x)
    sig = structure.sigma_tr
    state = _is_state(x, tol)
    if state:
        obs = unvec(gamma_superop(sig, -1.0, tol) @ vec(x), d)
    else:
        obs = x
    ph = hat_projector(structure, tol)
    th = hat_channel(phi, sig, tol=tol).transfer
    thnk = np.linalg.matrix_power(th, n * data.k)
    w = gamma_superop(sig, 0.5, tol)
    dx = vec(obs - ph(obs))
    lhs = float(np.linalg.norm(w @ thnk @ dx))
    rhs = float((1.0 - data.lambda_k) ** (n / 2.0) * np.linalg.norm(w @ dx))
    tl = tr = None
    if state:
        tnk = np.linalg.matrix_power(phi.transfer, n * data.k)
        p = structure.phase_projector.transfer
        tl = schatten_norm(unvec(tnk @ (vec(x) - p @ vec(x)), d), 1)
        tr = data.prefactor * (1.0 - data.lambda_k) ** (n / 2.0)
    return ContractionDiagnostic(lhs, rhs, tl, tr, data.k, n)


def state_observable_chain(phi, structure, rho, tol=DEFAULT_TOL):
    """``(||Phi(rho - P rho)||_1, ||Phi_hat(X - P_hat X)||_(1,sigma), ||...||_(2,sigma))``.

    The first two agree and are bounded by the third.
    """
    d = phi.dim
    rho = check_state(rho, tol)
    sig = structure.sigma_tr
    p = structure.phase_projector.transfer
    a = schatten_norm(unvec(phi.transfer @ (vec(rho) - p @ vec(rho)), d), 1)
    x = unvec(gamma_superop(sig, -1.0, tol) @ vec(rho), d)
    ph = hat_projector(structure, tol).transfer
    th = hat_channel(phi, sig, tol=tol).transfer
    y = unvec(th @ (vec(x) - ph @ vec(x)), d)
    b = weighted_trace_norm(sig, y, tol)
    c = float(np.linalg.norm(gamma_superop(sig, 0.5, tol) @ vec(y)))
    return a, b, c


# ---------------------------------------------------------------- bound catalog


@dataclass(frozen=True)
class BoundReport:
    """Value of a closed-form bound together with its inputs.

    ``value`` is ``inf`` when the bound degenerates (for instance a unit
    determinant); ``applicable`` is false with a ``reason`` when the
    hypotheses fail.
    """

    name: str
    value: float
    inputs: dict
    applicable: bool = True
    reason: str = ""
    extra: dict = field(default_factory=dict)

    def as_dict(self):
        def clean(v):
            if isinstance(v, (float, np.floating)):
                v = float(v)
                return v if math.isfinite(v) else ("inf" if v > 0 else ("-inf" if v < 0 else "nan"))
            if isinstance(v, (np.integer,)):
                return int(v)
            if isinstance(v, np.ndarray):
                return v.real.tolist() if np.allclose(v.imag, 0) else [[z.real, z.imag] for z in v.ravel()]
            return v

        return {
            "name": self.name,
            "value": clean(self.value),
            "inputs": {k: clean(v) for k, v in self.inputs.items()},
            "applicable": self.applicable,
            "reason": self.reason,
            "extra": {k: clean(v) for k, v in self.extra.items()},
        }


def _na(name, reason, inputs=None):
    return BoundReport(name, float("nan"), inputs or {}, False, reason)


def _inv_norm(sigma, tol=DEFAULT_TOL):
    s = check_positive_definite(sigma, tol)
    return 1.0 / lambda_min(s)


def _positive(name, **vals):
    for k, v in vals.items():
        if v is None:
            raise ParameterError(f"{name}: missing input {k}")
        if not v > 0:
            raise ParameterError(f"{name}: input {k}={v} must be positive")


def t_eb_lower(generator=None, eigenvalues=None, d=None):
    """``t0 = ln(d + 1) / max_j |Re lambda_j(L)|``; also reports ``t0/2`` for LEA2."""
    if generator is not None:
        g = as_matrix(generator)
        ev = eig_general(g).eigenvalues
        d = int(round(math.sqrt(g.shape[0])))
    else:
        if eigenvalues is None or d is None:
            raise ParameterError("t_eb_lower needs a generator or eigenvalues with d")
        ev = np.asarray(eigenvalues, dtype=complex)
    rate = float(np.max(np.abs(ev.real)))
    t0 = math.inf if rate == 0.0 else math.log(d + 1) / rate
    return BoundReport("t_eb_lower", t0, {"d": d, "max_abs_re": rate}, extra={"t_lea2_lower": t0 / 2.0})


def t_eb_upper(K, gamma, sigma, tol=DEFAULT_TOL):
    """``ln(K d ||sigma^-1||_inf) / gamma``."""
    _positive("t_eb_upper", K=K, gamma=gamma)
    s = as_matrix(sigma)
    inv = _inv_norm(s, tol)
    d = s.shape[0]
    return BoundReport("t_eb_upper", math.log(K * d * inv) / gamma,
                       {"K": K, "gamma": gamma, "d": d, "sigma_inv_norm": inv})


def t_ea_upper(sigma, omega, lam, tol=DEFAULT_TOL):
    """``(3/2) ln(||sigma^-1|| ||omega^-1||) / lambda``."""
    _positive("t_ea_upper", lam=lam)
    a, b = _inv_norm(sigma, tol), _inv_norm(omega, tol)
    return BoundReport("t_ea_upper", 1.5 * math.log(a * b) / lam,
                       {"lambda": lam, "sigma_inv_norm": a, "omega_inv_norm": b})


def _primitive_discrete(phi, structure, tol):
    data = poincare(phi, structure, tol)
    d = phi.dim
    inv = _inv_norm(structure.invariant_state, tol)
    rest = 1.0 - data.lambda_k
    if rest <= 1e-15:
        # Phi^k is already the replacement channel onto a full-rank state
        val = float(data.k)
    else:
        val = 3.0 * data.k * math.log(d * inv) / (-math.log(rest))
    return val, data, inv


def n_eb_upper_discrete(phi, structure=None, tol=DEFAULT_TOL, seed=0):
    """Upper bound on the entanglement-breaking index.

    Primitive channels: ``3 k ln(d ||sigma^-1||) / (-ln(1 - lambda_k))``.
    Other faithful channels: ``d^2 Z max_i n_i`` over the primitive blocks of
    ``Phi^(d^2 Z)``, when it is a direct sum of primitive channels.
    """
    name = "n_eb_upper_discrete"
    phi.require_cptp(name)
    if structure is None:
        structure = classify(phi, tol, seed)
    if not structure.is_faithful:
        return _na(name, "channel is not faithful")
    d = phi.dim
    if structure.is_primitive:
        val, data, inv = _primitive_discrete(phi, structure, tol)
        return BoundReport(name, val, {"d": d, "k": data.k, "lambda_k": data.lambda_k, "sigma_inv_norm": inv})
    dsc = direct_sum_of_primitive_check(phi, structure, tol, seed)
    if not dsc.is_direct_sum:
        return _na(name, f"not eventually entanglement breaking: {dsc.reason}", {"d": d})
    per_block = []
    for blk in dsc.blocks:
        if blk.dim == 1:
            per_block.append(1.0)
            continue
        st = classify(blk, tol, seed)
        per_block.append(_primitive_discrete(blk, st, tol)[0])
    val = dsc.power * max(per_block)
    return BoundReport(name, float(val), {"d": d, "cycle_lcm": dsc.cycle_lcm, "power": dsc.power},
                       extra={"block_bounds": per_block})


def _is_ppt_channel(phi, tol):
    from .separability import ppt_check

    d = phi.dim
    return ppt_check(phi.choi_state, (d, d), tol).ppt_holds


def n_eb_upper_ppt(phi=None, K_tilde=None, gamma_tilde=None, sigma=None, k=1, tol=DEFAULT_TOL, seed=0):
    """``k ln(d K~ ||sigma^-1||) / ln gamma~`` for PPT channels with a full-rank invariant state.

    The constants describe decay of ``Phi^(n k) (x) id`` as ``K~ gamma~^-n``.
    Given ``phi`` they are computed from its Poincare data: ``K~`` is
    ``sqrt(d ||sigma_Tr^-1||)`` (the weight of ``Phi (x) id``) and
    ``gamma~ = (1 - lambda_k)^(-1/2)``.
    """
    name = "n_eb_upper_ppt"
    inputs = {}
    if phi is not None:
        phi.require_cptp(name)
        structure = classify(phi, tol, seed)
        if not structure.is_faithful:
            return _na(name, "channel has no full-rank invariant state")
        if not _is_ppt_channel(phi, tol):
            return _na(name, "channel is not PPT")
        data = poincare(phi, structure, tol)
        d = phi.dim
        sigma = structure.sigma_tr
        K_tilde = math.sqrt(d) * data.prefactor
        rest = 1.0 - data.lambda_k
        gamma_tilde = math.inf if rest <= 1e-15 else rest ** -0.5
        k = data.k
        inputs["lambda_k"] = data.lambda_k
    if sigma is None:
        raise ParameterError(f"{name}: missing sigma")
    _positive(name, K_tilde=K_tilde, gamma_tilde=gamma_tilde)
    s = as_matrix(sigma)
    d = s.shape[0]
    inv = _inv_norm(s, tol)
    inputs.update({"d": d, "K_tilde": K_tilde, "gamma_tilde": gamma_tilde, "k": k, "sigma_inv_norm": inv})
    if gamma_tilde <= 1.0:
        return _na(name, "gamma_tilde must exceed 1", inputs)
    if math.isinf(gamma_tilde):
        return BoundReport(name, float(k), inputs)
    return BoundReport(name, k * math.log(d * K_tilde * inv) / math.log(gamma_tilde), inputs)


def n_lea2_lower_reversible(phi, sigma, tol=DEFAULT_TOL):
    """``ln(d lambda_min(sigma)/||sigma||) / ln ||(Phi^*)^-1||_(2,sigma -> 2,sigma)``."""
    name = "n_lea2_lower_reversible"
    s = check_positive_definite(sigma, tol)
    d = phi.dim
    t = phi.transfer
    g = gamma_superop(s, 1.0, tol)
    ginv = gamma_superop(s, -1.0, tol)
    # reversibility: Phi^* is self-adjoint in the sigma-weighted product
    res = float(np.linalg.norm(ginv @ t @ g - t.conj().T, 2) / max(1.0, np.linalg.norm(t, 2)))
    inputs = {"d": d, "reversibility_residual": res}
    if res > 1e-8:
        return _na(name, "channel is not reversible with respect to sigma", inputs)
    sv = np.linalg.svd(t, compute_uv=False)
    if sv[-1] <= 1e-14:
        return _na(name, "channel is singular", inputs)
    w = gamma_superop(s, 0.5, tol)
    winv = gamma_superop(s, -0.5, tol)
    inv_norm = float(np.linalg.norm(w @ np.linalg.inv(t.conj().T) @ winv, 2))
    ev = np.linalg.eigvalsh(s)
    num = math.log(d * ev[0] / ev[-1])
    inputs.update({"inverse_norm": inv_norm})
    if inv_norm <= 1.0 + 1e-14:
        return BoundReport(name, math.inf, inputs)
    return BoundReport(name, num / math.log(inv_norm), inputs)


def n_ea_lower_det(ell=None, d=None, phi=None):
    """``d^2 ln d / (2 ln(1/ell))``; compositions of fewer maps are not EA. ``ell = 1`` gives ``inf``."""
    name = "n_ea_lower_det"
    if phi is not None:
        ell = abs(complex(np.linalg.det(phi.transfer)))
        d = phi.dim
    if ell is None or d is None:
        raise ParameterError(f"{name}: needs ell and d")
    if not 0.0 < ell <= 1.0 + 1e-12:
        return _na(name, "need 0 < ell <= 1", {"ell": ell, "d": d})
    if ell >= 1.0 - 1e-12:
        return BoundReport(name, math.inf, {"ell": ell, "d": d})
    return BoundReport(name, d * d * math.log(d) / (2.0 * math.log(1.0 / ell)), {"ell": ell, "d": d})


def n_mu_upper(phi, tol=DEFAULT_TOL, seed=0):
    """``-3 ln d / (2 ln(1 - lambda))`` for primitive doubly stochastic self-adjoint channels."""
    name = "n_mu_upper"
    d = phi.dim
    if not (phi.is_cptp and phi.is_unital):
        return _na(name, "channel is not doubly stochastic", {"d": d})
    t = phi.transfer
    res = float(np.linalg.norm(t - t.conj().T, 2))
    if res > 1e-8:
        return _na(name, "channel is not self-adjoint", {"d": d, "self_adjoint_residual": res})
    structure = classify(phi, tol, seed)
    if not structure.is_primitive:
        return _na(name, "channel is not primitive", {"d": d})
    data = poincare(phi, structure, tol)
    s1 = data.norms[1]
    lam = 1.0 - s1 * s1
    inputs = {"d": d, "lambda": lam}
    if s1 <= 1e-15:
        return BoundReport(name, 1.0, inputs)
    return BoundReport(name, -3.0 * math.log(d) / (2.0 * math.log(1.0 - lam)), inputs)


def n_mu_upper_hs(phi, tol=DEFAULT_TOL, seed=0):
    """``-3 ln(d^2 - 1) / ln(1 - lambda)``, the power at which the 2-norm
    estimate ``||J(Phi^n)/d - I/d^2||_2 <= sqrt(d^2 - 1) (1 - lambda)^(n/2) / d``
    falls below the mixed-unitary radius ``1/(d (d^2 - 1))``.

    Same hypotheses as :func:`n_mu_upper`.
    """
    base = n_mu_upper(phi, tol, seed)
    if not base.applicable:
        return BoundReport("n_mu_upper_hs", base.value, base.inputs, False, base.reason)
    d = phi.dim
    lam = base.inputs["lambda"]
    if lam >= 1.0 - 1e-15:
        return BoundReport("n_mu_upper_hs", 1.0, base.inputs)
    val = -3.0 * math.log(d * d - 1) / math.log(1.0 - lam)
    return BoundReport("n_mu_upper_hs", val, base.inputs)


def n_eb_upper_rwa(g, gamma):
    """``3 ln(2(1 + g)) / (-2 ln|gamma|)`` for the two-level rotating-wave example."""
    name = "n_eb_upper_rwa"
    if not 0.0 < abs(gamma) < 1.0:
        return _na(name, "need 0 < |gamma| < 1", {"g": g, "gamma": gamma})
    return BoundReport(name, 3.0 * math.log(2.0 * (1.0 + g)) / (-2.0 * math.log(abs(gamma))),
                       {"g": g, "gamma": gamma})


def _fvdg(eps):
    return math.log(1.0 / (1.0 - eps * eps / 4.0))


def t_aqmc(K, gamma, eps, dimA=None, dimB=None):
    """Minimum over the ``A`` and ``B`` sides of ``(1/gamma) ln(((ln|X| + 1) K + K^2/2) / ln(1/(1 - eps^2/4)))``."""
    name = "t_aqmc"
    _positive(name, K=K, gamma=gamma, eps=eps)
    if eps >= 2.0:
        return _na(name, "need eps < 2", {"eps": eps})
    sides = {}
    for side, dim in (("A", dimA), ("B", dimB)):
        if dim is not None:
            num = (math.log(dim) + 1.0) * K + K * K / 2.0
            sides[side] = math.log(num / _fvdg(eps)) / gamma
    if not sides:
        raise ParameterError(f"{name}: needs dimA or dimB")
    inputs = {"K": K, "gamma": gamma, "eps": eps, "dimA": dimA, "dimB": dimB}
    return BoundReport(name, min(sides.values()), inputs, extra={f"side_{k}": v for k, v in sides.items()})


def t_aqmc_mlsi(alpha1, sigma, eps, tol=DEFAULT_TOL):
    """``(1/(2 alpha1)) ln(ln ||sigma^-1|| / ln(1/(1 - eps^2/4)))``; ``alpha1`` is an input, never computed."""
    name = "t_aqmc_mlsi"
    _positive(name, alpha1=alpha1, eps=eps)
    inv = _inv_norm(sigma, tol)
    inputs = {"alpha1": alpha1, "eps": eps, "sigma_inv_norm": inv}
    if inv <= 1.0 or eps >= 2.0:
        return _na(name, "need ||sigma^-1|| > 1 and eps < 2", inputs)
    return BoundReport(name, math.log(math.log(inv) / _fvdg(eps)) / (2.0 * alpha1), inputs)


def t_aqmc_naive(lam, sigma, eps, tol=DEFAULT_TOL):
    """``(1/lambda) ln(||sigma^-1|| / eps)``."""
    name = "t_aqmc_naive"
    _positive(name, lam=lam, eps=eps)
    inv = _inv_norm(sigma, tol)
    return BoundReport(name, math.log(inv / eps) / lam, {"lambda": lam, "eps": eps, "sigma_inv_norm": inv})


BOUNDS = {
    "t_eb_lower": t_eb_lower,
    "t_eb_upper": t_eb_upper,
    "t_ea_upper": t_ea_upper,
    "n_eb_upper_discrete": n_eb_upper_discrete,
    "n_eb_upper_ppt": n_eb_upper_ppt,
    "n_lea2_lower_reversible": n_lea2_lower_reversible,
    "n_ea_lower_det": n_ea_lower_det,
    "n_mu_upper": n_mu_upper,
    "n_mu_upper_hs": n_mu_upper_hs,
    "n_eb_upper_rwa": n_eb_upper_rwa,
    "t_aqmc": t_aqmc,
    "t_aqmc_mlsi": t_aqmc_mlsi,
    "t_aqmc_naive": t_aqmc_naive,
}


def bound(name, **inputs):
    """Evaluate a catalog bound by name."""
    try:
        fn = BOUNDS[name]
    except KeyError:
        raise ParameterError(f"unknown bound {name!r}; known: {sorted(BOUNDS)}") from None
    return fn(**inputs)


# ---------------------------------------------------------------- mixed unitary and Markov chains


def watrous_distance(phi):
    """``||J/d - I/d^2||_inf``."""
    d = phi.dim
    return schatten_norm(phi.choi_state - np.eye(d * d) / (d * d), np.inf)


def watrous_mixed_unitary_check(phi):
    """Mixed-unitary certificate ``||J/d - I/d^2||_inf <= 1/(d (d^2 - 1))`` for doubly stochastic maps."""
    if not (phi.is_cptp and phi.is_unital):
        raise InvalidChannelError("the mixed-unitary criterion needs a doubly stochastic channel")
    d = phi.dim
    return bool(watrous_distance(phi) <= 1.0 / (d * (d * d - 1)))


def first_mixed_unitary_power(phi, n_max=200):
    """Smallest ``n <= n_max`` with ``Phi^n`` passing the mixed-unitary criterion, else ``None``."""
    if not (phi.is_cptp and phi.is_unital):
        raise InvalidChannelError("the mixed-unitary criterion needs a doubly stochastic channel")
    t = np.eye(phi.dim ** 2, dtype=complex)
    for n in range(1, int(n_max) + 1):
        t = t @ phi.transfer
        if watrous_mixed_unitary_check(Channel(t, flags={"cp": Flag.VERIFIED, "tp": Flag.VERIFIED,
                                                          "unital": Flag.VERIFIED})):
            return n
    return None


def cqmi(rho, dims, tol=DEFAULT_TOL):
    """Conditional mutual information ``I(A:C|B) = S(AB) + S(BC) - S(B) - S(ABC)`` in nats."""
    dims = tuple(int(x) for x in dims)
    if len(dims) != 3:
        raise DimensionError("cqmi needs three factor dimensions")
    rho = check_state(rho, tol)
    if rho.shape[0] != int(np.prod(dims)):
        raise DimensionError(f"state of size {rho.shape[0]} does not match dims {dims}")
    s_ab = entropy(partial_trace_multi(rho, dims, [0, 1]), tol)
    s_bc = entropy(partial_trace_multi(rho, dims, [1, 2]), tol)
    s_b = entropy(partial_trace_multi(rho, dims, [1]), tol)
    s_abc = entropy(hermitize(rho), tol)
    return s_ab + s_bc - s_b - s_abc
