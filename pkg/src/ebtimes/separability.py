"""Separability certificates for states and entanglement-breaking tests for channels.

Entanglement is certified by a negative partial transpose. Separability is
certified by a Hilbert-Schmidt ball around a product state: a Hermitian
perturbation ``Delta`` of ``omega (x) sigma`` with
``||Delta||_2 <= lambda_min(omega) lambda_min(sigma)`` stays separable.
Channel verdicts apply these to the normalized Choi matrix ``J / d``, either
globally or block by block when the channel is a direct sum.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .channel import Channel, Flag, map_norm, power
from .errors import DimensionError, NotPositiveError
from .linalg import (
    DEFAULT_TOL,
    DimSplit,
    check_state,
    eigvals_hermitian,
    hermitian_residual,
    hermitize,
    kron,
    lambda_min,
    partial_transpose,
    schatten_norm,
    unvec,
    vec,
)
from .structure import classify, direct_sum_of_primitive_check

log = logging.getLogger(__name__)

SEPARABLE = "separable_certified"
ENTANGLED = "entangled_certified"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class SepVerdict:
    """Outcome of a separability test.

    Attributes
    ----------
    status : str
        ``"separable_certified"``, ``"entangled_certified"`` or ``"inconclusive"``.
    method : str
        ``"ppt_violation"``, ``"gurvits_ball"``, ``"blockwise_ball"`` or ``"robustness"``.
    magnitude : float
        PPT violation ``|lambda_min|`` for the PPT test, otherwise the
        2-norm distance to the anchor.
    slack : float or None
        Radius minus distance for ball certificates.
    min_eigenvalue : float or None
        Smallest eigenvalue of the partial transpose (PPT test only).
    """

    status: str
    method: str
    magnitude: float
    slack: Optional[float] = None
    min_eigenvalue: Optional[float] = None
    details: dict = field(default_factory=dict, compare=False)

    @property
    def separable(self):
        return self.status == SEPARABLE

    @property
    def entangled(self):
        return self.status == ENTANGLED

    @property
    def ppt_holds(self):
        return self.method == "ppt_violation" and self.status != ENTANGLED

    def as_dict(self):
        out = {"status": self.status, "method": self.method, "magnitude": float(self.magnitude)}
        if self.slack is not None:
            out["slack"] = float(self.slack)
        if self.min_eigenvalue is not None:
            out["min_eigenvalue"] = float(self.min_eigenvalue)
        return out


def _split(split, n):
    s = split if isinstance(split, DimSplit) else DimSplit(*split)
    if s.total != n:
        raise DimensionError(f"state of size {n} does not match split {s.dim_a}x{s.dim_b}")
    return s


def ppt_check(rho, split, tol=DEFAULT_TOL):
    """Positive-partial-transpose test.

    ``entangled_certified`` when the smallest eigenvalue of the partial
    transpose is below ``-tol.psd * ||rho||_inf``; ``inconclusive`` (PPT
    holds) otherwise.
    """
    rho = check_state(rho, tol)
    s = _split(split, rho.shape[0])
    lmin = lambda_min(partial_transpose(rho, s, "B"))
    thr = -tol.psd * max(schatten_norm(rho, np.inf), 1e-300)
    status = ENTANGLED if lmin < thr else INCONCLUSIVE
    return SepVerdict(status, "ppt_violation", max(0.0, -lmin), min_eigenvalue=lmin)


def _ball(rho, omega, sigma, method):
    dist = schatten_norm(rho - kron(omega, sigma), 2)
    radius = lambda_min(omega) * lambda_min(sigma)
    slack = radius - dist
    status = SEPARABLE if slack >= 0.0 else INCONCLUSIVE
    return SepVerdict(status, method, dist, slack=slack, details={"radius": radius})


def _anchor(m, name, tol):
    m = check_state(m, tol, name)
    if lambda_min(m) <= 0.0:
        raise NotPositiveError(f"anchor {name} is not positive definite")
    return m


def gurvits_ball(rho, omega, sigma, split, tol=DEFAULT_TOL):
    """Separability ball around ``omega (x) sigma``.

    Certifies separability when ``||rho - omega (x) sigma||_2 <= lambda_min(omega) lambda_min(sigma)``;
    ``omega`` lives on the first factor and ``sigma`` on the second.
    """
    rho = check_state(rho, tol)
    s = _split(split, rho.shape[0])
    omega = _anchor(omega, "omega", tol)
    sigma = _anchor(sigma, "sigma", tol)
    if omega.shape[0] != s.dim_a or sigma.shape[0] != s.dim_b:
        raise DimensionError("anchor sizes do not match the split")
    return _ball(rho, omega, sigma, "gurvits_ball")


def robustness_product(rho_a, rho_b):
    """Robustness of separability of ``rho_a (x) rho_b``, ``d_A d_B lambda_min lambda_min``.

    Rank-deficient factors give 0.
    """
    la = max(0.0, lambda_min(rho_a))
    lb = max(0.0, lambda_min(rho_b))
    return float(rho_a.shape[0] * rho_b.shape[0] * la * lb)


def robustness_ball(rho, rho_a, rho_b, tol=DEFAULT_TOL):
    """Ball of radius ``R(rho_a (x) rho_b) / d_H`` around ``rho_a (x) rho_b``."""
    rho = check_state(rho, tol)
    da, db = rho_a.shape[0], rho_b.shape[0]
    _split((da, db), rho.shape[0])
    r = robustness_product(rho_a, rho_b)
    dist = schatten_norm(rho - kron(rho_a, rho_b), 2)
    radius = r / (da * db)
    slack = radius - dist
    status = SEPARABLE if slack >= 0.0 and r > 0.0 else INCONCLUSIVE
    return SepVerdict(status, "robustness", dist, slack=slack, details={"robustness": r, "radius": radius})


# ---------------------------------------------------------------- channels


def _iso(p, cut=0.5):
    w, u = np.linalg.eigh(hermitize(p))
    return u[:, w > cut]


def _blockwise(phi, blocks, anchor_of, tol):
    """Ball certificate for ``J/d`` split along input blocks.

    ``anchor_of(q)`` returns the (unnormalized) output anchor for the block
    with projection ``q``.
    """
    d = phi.dim
    jh = phi.choi_state
    eye = np.eye(d)
    parts = []
    for q in blocks:
        qq = np.kron(eye, q.conj())
        parts.append(qq @ jh @ qq)
    leak = schatten_norm(jh - sum(parts), 2)
    if leak > tol.offdiag:
        return SepVerdict(INCONCLUSIVE, "blockwise_ball", np.inf, slack=-np.inf, details={"leakage": leak})
    slacks, dists = [], []
    for q, ja in zip(blocks, parts):
        v = _iso(q)
        da = v.shape[1]
        weight = np.trace(ja).real
        if weight <= 0.0:
            continue
        om = hermitize(anchor_of(q))
        om = om / np.trace(om).real
        w, u = np.linalg.eigh(om)
        keep = w > tol.rank * w[-1]
        wsup = u[:, keep]
        bas = np.kron(wsup, v.conj())
        ra = bas.conj().T @ ja @ bas / weight
        out_leak = np.sqrt(max(schatten_norm(ja / weight, 2) ** 2 - schatten_norm(ra, 2) ** 2, 0.0))
        if out_leak > tol.offdiag:
            return SepVerdict(INCONCLUSIVE, "blockwise_ball", np.inf, slack=-np.inf, details={"leakage": out_leak})
        omr = np.diag(w[keep]).astype(complex)
        dist = schatten_norm(ra - np.kron(omr, np.eye(da) / da), 2)
        radius = w[keep].min() / da
        slacks.append(radius - dist)
        dists.append(dist)
    slack = float(min(slacks))
    method = "blockwise_ball" if len(blocks) > 1 else "gurvits_ball"
    status = SEPARABLE if slack >= 0.0 else INCONCLUSIVE
    return SepVerdict(status, method, float(max(dists)), slack=slack, details={"leakage": leak, "blocks": len(blocks)})


def eb_check(phi, structure=None, tol=DEFAULT_TOL, seed=0):
    """Entanglement-breaking verdict for a channel.

    Parameters
    ----------
    phi : Channel
        CPTP map to test.
    structure : AsymptoticStructure, optional
        Structure of ``phi`` or of a channel of which ``phi`` is a power.
        Its refined cyclic projections give the input blocks and its phase
        projector ``P`` the anchors ``phi(P(q)) / Tr q``. Computed from
        ``phi`` when omitted.

    Returns
    -------
    SepVerdict
        ``entangled_certified`` from a PPT violation of ``J/d``,
        ``separable_certified`` from a global or blockwise ball, else
        ``inconclusive``. ``details["ppt"]`` holds the PPT data.
    """
    phi.require_cptp("eb_check")
    d = phi.dim
    if structure is None:
        structure = classify(phi, tol, seed)
    if structure.dim != d:
        raise DimensionError("structure/channel dimension mismatch")
    ppt = ppt_check(phi.choi_state, (d, d), tol)
    if ppt.entangled:
        return SepVerdict(ENTANGLED, "ppt_violation", ppt.magnitude, min_eigenvalue=ppt.min_eigenvalue,
                          details={"ppt": ppt})
    pp = structure.phase_projector
    partitions = [[np.eye(d, dtype=complex)]]
    blocks = structure.refined_blocks() if structure.is_faithful else []
    if len(blocks) > 1:
        partitions.insert(0, blocks)
    anchors = (lambda q: phi(pp(q)), lambda q: phi(q))
    best = None
    for part in partitions:
        for anchor in anchors:
            v = _blockwise(phi, part, anchor, tol)
            if v.separable:
                return SepVerdict(v.status, v.method, v.magnitude, slack=v.slack,
                                  min_eigenvalue=ppt.min_eigenvalue, details={**v.details, "ppt": ppt})
            if best is None or (v.slack is not None and v.slack > best.slack):
                best = v
    return SepVerdict(INCONCLUSIVE, best.method, best.magnitude, slack=best.slack,
                      min_eigenvalue=ppt.min_eigenvalue, details={**best.details, "ppt": ppt})


@dataclass(frozen=True)
class EBIndexBracket:
    """Certified bracket on the entanglement-breaking index.

    Attributes
    ----------
    ppt_lower : int or None
        Smallest tested ``n`` with ``J(Phi^n)/d`` PPT; entanglement is
        certified for every smaller ``n``.
    ball_upper : int or None
        Smallest tested ``n`` with a separability certificate.
    theorem_bound : float or None
        Closed-form upper bound on the index when applicable.
    verdict : str
        ``"exact"``, ``"bracket"``, ``"not_eeb_detected"`` or ``"inconclusive"``.
    interval : tuple
        ``(lo, hi)``, with ``hi = None`` when no upper certificate was found.
    trace : list of dict
        Per-``n`` PPT minimum eigenvalue and ball slack.
    """

    ppt_lower: Optional[int]
    ball_upper: Optional[int]
    theorem_bound: Optional[float]
    verdict: str
    interval: tuple
    trace: list = field(default_factory=list)
    direct_sum: object = None
    notes: tuple = ()

    def as_dict(self, with_trace=False):
        out = {
            "ppt_lower": self.ppt_lower,
            "ball_upper": self.ball_upper,
            "theorem_bound": self.theorem_bound,
            "verdict": self.verdict,
            "interval": list(self.interval),
            "notes": list(self.notes),
        }
        if with_trace:
            out["trace"] = self.trace
        return out


def eb_index_search(phi, n_max, tol=DEFAULT_TOL, seed=0, structure=None):
    """Bracket the entanglement-breaking index by testing ``Phi^n``, ``n = 1..n_max``.

    The search stops at the first ball certificate. For faithful channels
    that fail the direct-sum-of-primitives test (never entanglement
    breaking) all ``n_max`` powers are tested and the verdict is
    ``not_eeb_detected`` unless a certificate contradicts it.
    """
    from .decoherence import n_eb_upper_discrete

    phi.require_cptp("eb_index_search")
    n_max = int(n_max)
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    d = phi.dim
    if structure is None:
        structure = classify(phi, tol, seed)
    dsc = direct_sum_of_primitive_check(phi, structure, tol) if structure.is_faithful else None
    rep = n_eb_upper_discrete(phi, structure, tol)
    bound = float(rep.value) if rep.applicable else None
    phi_is_ppt = ppt_check(phi.choi_state, (d, d), tol).ppt_holds
    notes = []
    trace = []
    ppt_lower = ball_upper = None
    t = np.eye(d * d, dtype=complex)
    prev_ppt = False
    for n in range(1, n_max + 1):
        t = t @ phi.transfer
        phin = Channel(t, flags={"cp": Flag.VERIFIED, "tp": Flag.VERIFIED})
        v = eb_check(phin, structure, tol)
        holds = not v.entangled
        trace.append({"n": n, "ppt_min_eigenvalue": v.min_eigenvalue, "status": v.status,
                      "method": v.method, "slack": v.slack})
        if prev_ppt and not holds and phi_is_ppt:
            log.warning("PPT lost at n=%d after holding at n=%d; numerical error suspected", n, n - 1)
            notes.append(f"PPT monotonicity violated at n={n}")
        prev_ppt = holds
        if ppt_lower is None and holds:
            ppt_lower = n
        if v.separable:
            ball_upper = n
            break
    if ball_upper is not None:
        lo = ppt_lower if ppt_lower is not None else ball_upper
        verdict = "exact" if lo == ball_upper else "bracket"
        if dsc is not None and not dsc.is_direct_sum:
            notes.append("separability certificate found although the direct-sum test failed")
        interval = (lo, ball_upper)
    elif dsc is not None and not dsc.is_direct_sum:
        verdict = "not_eeb_detected"
        interval = (ppt_lower if ppt_lower is not None else n_max + 1, None)
    else:
        verdict = "inconclusive"
        interval = (ppt_lower if ppt_lower is not None else n_max + 1, None)
    return EBIndexBracket(ppt_lower, ball_upper, bound, verdict, interval, trace, dsc, tuple(notes))


@dataclass(frozen=True)
class OneShotVerdict:
    not_lea2: bool
    not_eb: bool
    hs_norm: float
    trace_norm: float


def lea2_oneshot(phi):
    """Norm criteria excluding entanglement annihilation and breaking.

    ``not_lea2`` when ``||Phi||_2 > sqrt(d)``; ``not_eb`` additionally when
    the Schatten-1 norm of the transfer matrix exceeds ``d`` (realignment).
    """
    d = phi.dim
    hs = map_norm(phi, "hs")
    tr = map_norm(phi, "trace_of_transfer")
    not_lea2 = bool(hs > np.sqrt(d))
    return OneShotVerdict(not_lea2, bool(not_lea2 or tr > d), hs, tr)


def lea2_inverse_check(phi, k):
    """True when ``||Phi^-k||_{2->2} <= d``, which rules out ``Phi^k`` annihilating entanglement."""
    k = int(k)
    return bool(map_norm(power(phi, k), "two_to_two_inverse") <= phi.dim)
