import logging
import math

import numpy as np
import pytest

from ebtimes.channel import (
    completely_depolarizing,
    depolarizing,
    identity,
    irreducible_period2,
    point,
    qubit_nilpotent,
    unitary_channel,
)
from ebtimes.errors import DimensionError, NotPositiveError
from ebtimes.linalg import kron
from ebtimes.sampling import block_diagonal_channel, random_channel, random_state, random_unitary
from ebtimes.separability import (
    ENTANGLED,
    INCONCLUSIVE,
    SEPARABLE,
    eb_check,
    eb_index_search,
    gurvits_ball,
    lea2_inverse_check,
    lea2_oneshot,
    ppt_check,
    robustness_ball,
    robustness_product,
)

HALF = np.eye(2) / 2


def bell():
    omega = np.array([1, 0, 0, 1]) / math.sqrt(2)
    return np.outer(omega, omega).astype(complex)


def isotropic(t):
    return depolarizing(2, math.exp(-t)).choi_state


def test_ppt_examples():
    v = ppt_check(bell(), (2, 2))
    assert v.status == ENTANGLED and np.isclose(v.magnitude, 0.5)
    for t in (0.5, 1.0, 2.0):
        v = ppt_check(isotropic(t), (2, 2))
        assert np.isclose(v.min_eigenvalue, (1 - 3 * math.exp(-t)) / 4)
    rng = np.random.default_rng(0)
    v = ppt_check(kron(random_state(2, rng), random_state(3, rng)), (2, 3))
    assert v.status == INCONCLUSIVE and v.ppt_holds
    with pytest.raises(DimensionError):
        ppt_check(bell(), (3, 2))


def test_gurvits_examples():
    rng = np.random.default_rng(1)
    om, si = random_state(2, rng), random_state(3, rng)
    v = gurvits_ball(kron(om, si), om, si, (2, 3))
    radius = np.linalg.eigvalsh(om)[0] * np.linalg.eigvalsh(si)[0]
    assert v.separable and np.isclose(v.slack, radius)
    t_star = math.log(2 * math.sqrt(3))
    assert gurvits_ball(isotropic(t_star + 1e-6), HALF, HALF, (2, 2)).separable
    assert not gurvits_ball(isotropic(t_star - 1e-6), HALF, HALF, (2, 2)).separable
    with pytest.raises(NotPositiveError):
        gurvits_ball(bell(), np.diag([1.0, 0.0]), HALF, (2, 2))


def test_maximally_mixed_anchor_in_dimension_four():
    # sixteen-dimensional state around I/16: the certificate reduces to ||16 rho - I||_2 <= 1
    rng = np.random.default_rng(2)
    q = np.eye(4) / 4
    for scale in (0.5, 0.99, 1.01):
        h = rng.standard_normal((16, 16)) + 1j * rng.standard_normal((16, 16))
        h = h + h.conj().T
        h -= np.trace(h) / 16 * np.eye(16)
        delta = scale * h / np.linalg.norm(h)
        rho = (np.eye(16) + delta) / 16
        assert gurvits_ball(rho, q, q, (4, 4)).separable == (scale <= 1)


def test_robustness_examples():
    assert np.isclose(robustness_product(HALF, HALF), 1)
    assert np.isclose(robustness_product(np.eye(3) / 3, np.eye(2) / 2), 1)
    assert np.isclose(robustness_product(np.diag([0.75, 0.25]), HALF), 0.5)
    assert robustness_product(np.diag([1.0, 0.0]), HALF) == 0.0
    v = robustness_ball(isotropic(2.0), HALF, HALF)
    assert v.separable and v.method == "robustness"
    assert not robustness_ball(kron(np.diag([1.0, 0.0]), HALF), np.diag([1.0, 0.0]), HALF).separable


def test_robustness_is_quasi_concave():
    rng = np.random.default_rng(3)
    a1, b1 = random_state(2, rng) + 0.3 * np.eye(2), random_state(2, rng) + 0.3 * np.eye(2)
    a2, b2 = random_state(2, rng) + 0.3 * np.eye(2), random_state(2, rng) + 0.3 * np.eye(2)
    a1, b1, a2, b2 = (m / np.trace(m) for m in (a1, b1, a2, b2))
    r = min(robustness_product(a1, b1), robustness_product(a2, b2))
    anchor = 0.5 * (kron(a1, b1) + kron(a2, b2))
    h = rng.standard_normal((4, 4))
    h = h + h.T
    h -= np.trace(h) / 4 * np.eye(4)
    rho = anchor + 0.9 * (r / 4) * h / np.linalg.norm(h)
    assert np.min(np.linalg.eigvalsh(rho)) > 0
    # every PPT-consistent point in the ball of radius R/d around the mixed anchor is separable
    assert ppt_check(rho, (2, 2)).ppt_holds


def test_certificates_are_ppt():
    rng = np.random.default_rng(4)
    for _ in range(20):
        om, si = random_state(2, rng) + 0.2 * np.eye(2), random_state(2, rng) + 0.2 * np.eye(2)
        om, si = om / np.trace(om), si / np.trace(si)
        r = np.linalg.eigvalsh(om)[0] * np.linalg.eigvalsh(si)[0]
        h = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        h = h + h.conj().T
        h -= np.trace(h) / 4 * np.eye(4)
        rho = kron(om, si) + rng.uniform(0, 1.2) * r * h / np.linalg.norm(h)
        if np.min(np.linalg.eigvalsh(rho)) < 0:
            continue
        if gurvits_ball(rho, om, si, (2, 2)).separable:
            assert ppt_check(rho, (2, 2)).ppt_holds


def test_eb_check_examples():
    tau = random_state(2, np.random.default_rng(5))
    assert eb_check(point(tau)).status == SEPARABLE
    v = eb_check(identity(2))
    assert v.status == ENTANGLED and np.isclose(v.magnitude, 0.5)
    v = eb_check(qubit_nilpotent())
    assert v.status == INCONCLUSIVE
    assert v.details["ppt"].ppt_holds
    assert np.isclose(v.magnitude, 0.5) and np.isclose(v.slack, -0.25)


def test_eb_check_blockwise_on_dephasing():
    phi = block_diagonal_channel([identity(1), identity(1)])
    v = eb_check(phi)
    assert v.separable
    assert v.method in ("blockwise_ball", "gurvits_ball")


def test_eb_index_examples():
    res = eb_index_search(qubit_nilpotent(), 10)
    assert (res.ppt_lower, res.ball_upper) == (1, 2)
    assert res.interval == (1, 2) and res.verdict == "bracket"
    res = eb_index_search(depolarizing(2, 0.5), 10)
    assert res.ppt_lower == 2 and res.verdict == "exact"
    res = eb_index_search(irreducible_period2(0.5), 20)
    assert res.verdict == "not_eeb_detected" and res.ball_upper is None
    assert all(row["status"] == ENTANGLED for row in res.trace)
    assert len(res.trace) == 20


def test_eb_index_unitary_channel_is_never_eb():
    u = random_unitary(2, np.random.default_rng(6))
    res = eb_index_search(unitary_channel(u), 5)
    assert res.ppt_lower is None and res.ball_upper is None
    assert res.verdict == "not_eeb_detected"


def test_eb_index_is_ppt_monotone_on_random_channels(caplog):
    rng = np.random.default_rng(7)
    with caplog.at_level(logging.WARNING, logger="ebtimes"):
        for _ in range(5):
            res = eb_index_search(random_channel(2, rng=rng), 30)
            assert res.ball_upper is not None
            seen = [row["status"] != ENTANGLED for row in res.trace]
            first = seen.index(True)
            assert all(seen[first:])
    assert not any("monotonicity" in r.message for r in caplog.records)


def test_eb_index_rejects_bad_n():
    with pytest.raises(ValueError):
        eb_index_search(depolarizing(2, 0.5), 0)


def test_oneshot_examples():
    v = lea2_oneshot(identity(2))
    assert v.not_lea2 and v.not_eb and np.isclose(v.hs_norm, 2)
    v = lea2_oneshot(completely_depolarizing(2))
    assert not v.not_lea2 and not v.not_eb and np.isclose(v.hs_norm, 1)
    p_star = 1 / math.sqrt(3)
    assert lea2_oneshot(depolarizing(2, p_star + 1e-6)).not_lea2
    assert not lea2_oneshot(depolarizing(2, p_star - 1e-6)).not_lea2


def test_oneshot_realignment_without_hs():
    # above 1/3 the transfer trace norm 1 + 3p exceeds d while the HS test is silent until 1/sqrt(3)
    v = lea2_oneshot(depolarizing(2, 0.5))
    assert v.not_eb and not v.not_lea2


def test_inverse_check_examples():
    u = random_unitary(3, np.random.default_rng(8))
    assert all(lea2_inverse_check(unitary_channel(u), k) for k in (1, 5, 20))
    p = 0.7
    kmax = math.log(2) / math.log(1 / p)
    for k in range(1, 5):
        assert lea2_inverse_check(depolarizing(2, p), k) == (k <= kmax)
