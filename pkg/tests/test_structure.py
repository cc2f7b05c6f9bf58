import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ebtimes.channel import (
    Channel,
    compose,
    depolarizing,
    hadamard_cycle,
    identity,
    irreducible_period2,
    point,
    power,
    qubit_nilpotent,
)
from ebtimes.errors import HypothesisError, InvalidChannelError, ParameterError
from ebtimes.linalg import lambda_min, unvec, vec
from ebtimes.sampling import block_diagonal_channel, random_channel, random_state
from ebtimes.separability import ppt_check
from ebtimes.structure import (
    IrreducibleSpec,
    build_irreducible,
    classify,
    direct_sum_of_primitive_check,
    fixed_points,
    invariant_state,
    irreducible_components,
    peripheral_decomposition,
    period2_spec,
    regularize,
    similarity_normalize,
)

from factories import faithful_family

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def test_fixed_points_examples():
    assert len(fixed_points(identity(2))) == 4
    fp = fixed_points(depolarizing(2, 0.3))
    assert len(fp) == 1 and np.allclose(fp[0] / fp[0][0, 0], np.eye(2))
    fp = fixed_points(hadamard_cycle(3, 0.5))
    assert len(fp) == 1 and np.allclose(fp[0] / fp[0][0, 0], np.eye(3))


def test_invariant_state_examples():
    tau = random_state(3, np.random.default_rng(0))
    assert np.allclose(invariant_state(point(tau)), tau)
    assert np.allclose(invariant_state(depolarizing(3, 0.2)), np.eye(3) / 3)
    sigma = np.diag([0.6, 0.4]).astype(complex)
    p0 = np.diag([1.0, 0.0])
    # Tr(sigma p0) must be 1/2, so use a 4-level state
    sigma4 = np.diag([0.3, 0.2, 0.25, 0.25]).astype(complex)
    p04 = np.diag([1.0, 1.0, 0.0, 0.0])
    phi = irreducible_period2(0.2, sigma4, p04)
    assert np.allclose(invariant_state(phi), sigma4, atol=1e-9)
    with pytest.raises(HypothesisError):
        irreducible_period2(0.3, sigma, p0)


def test_classify_examples():
    st_ = classify(depolarizing(2, 0.5))
    assert st_.is_primitive and st_.lcm_period == 1
    assert np.allclose(st_.sigma_tr, np.eye(2) / 2)
    st_ = classify(qubit_nilpotent())
    assert st_.is_primitive
    rho = random_state(2, np.random.default_rng(1))
    assert np.allclose(st_.phase_projector(rho), np.eye(2) / 2)
    st_ = classify(irreducible_period2(0.5))
    assert st_.is_irreducible and not st_.is_primitive and st_.lcm_period == 2


def test_classify_non_faithful():
    st_ = classify(point(np.diag([1.0, 0.0])))
    assert not st_.is_faithful and not st_.is_primitive


@settings(max_examples=15, deadline=None)
@given(seeds)
def test_structure_invariants(seed):
    rng = np.random.default_rng(seed)
    for phi in faithful_family(4, (2, 3), seed=int(rng.integers(1 << 30))):
        s = classify(phi)
        p = s.phase_projector.transfer
        assert np.allclose(p @ p, p, atol=1e-8)
        assert np.allclose(p @ phi.transfer, phi.transfer @ p, atol=1e-8)
        sig = s.sigma_tr
        assert np.isclose(np.trace(sig), 1) and lambda_min(sig) > 0
        assert np.allclose(sum(c.projection for c in s.components), np.eye(phi.dim), atol=1e-8)
        for c in s.components:
            assert np.allclose(sum(c.perron_projections), c.projection, atol=1e-8)
            for q in c.perron_projections:
                assert np.allclose(sig @ q, q @ sig, atol=1e-8)


def test_periodic_peripheral_eigenvalues_are_roots_of_unity():
    for z, phi in ((2, irreducible_period2(0.4)), (4, hadamard_cycle(4, 0.5))):
        s = classify(phi)
        assert s.is_irreducible and s.lcm_period == z
        per = np.sort_complex(s.peripheral_eigenvalues)
        assert np.allclose(np.sort_complex(np.exp(2j * np.pi * np.arange(z) / z)), per, atol=1e-8)


def test_phase_decay_is_geometric():
    for phi in faithful_family(6, (2, 3), seed=3):
        p = classify(phi).phase_projector.transfer
        off = np.eye(p.shape[0]) - p
        norms = [np.linalg.norm(power(phi, n).transfer @ off, 2) for n in (1, 10, 50)]
        assert norms[2] <= max(norms[0], 1e-12) + 1e-9
        assert norms[2] <= 1e-3 or np.isclose(norms[0], norms[2])


def test_peripheral_decomposition_examples():
    dec = peripheral_decomposition(depolarizing(2, 0.4))
    assert dec.z == 1
    rho = random_state(2, np.random.default_rng(4))
    assert np.allclose(dec.phi_p(rho), np.eye(2) / 2)
    spec = period2_spec(0.45)
    dec = peripheral_decomposition(build_irreducible(spec))
    assert dec.z == 2
    assert np.allclose(dec.sigma, spec.sigma, atol=1e-8)
    got = sorted(np.round(np.diag(p).real, 8).tolist() for p in dec.projections)
    want = sorted(np.round(np.diag(p).real, 8).tolist() for p in spec.projections)
    assert got == want
    with pytest.raises(InvalidChannelError):
        peripheral_decomposition(identity(2))


def test_transient_and_rotating_parts_annihilate_trace():
    dec = peripheral_decomposition(irreducible_period2(0.5))
    rng = np.random.default_rng(5)
    x = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    assert abs(np.trace(dec.phi_q(x))) <= 1e-10
    # the non-trivial rotating part X -> u^n (...) carries no trace
    rotating = Channel(dec.phi_p.transfer - peripheral_decomposition(depolarizing(2, 0)).phi_p.transfer)
    assert abs(np.trace(rotating(x))) <= 1e-10


def test_build_irreducible_examples():
    sigma = random_state(2, np.random.default_rng(6))
    phi = build_irreducible(IrreducibleSpec(1, (np.eye(2),), sigma, np.zeros((4, 4))))
    assert np.allclose(phi.transfer, point(sigma).transfer)
    spec = period2_spec(0.6)
    phi = build_irreducible(spec)
    e0f0 = np.array([[0, 1], [0, 0]], dtype=complex)
    q = Channel(spec.phi_q)
    for n in range(1, 8):
        assert np.linalg.norm(power(q, n)(e0f0)) == pytest.approx(0.6 ** n)
    s = classify(phi)
    assert s.is_irreducible and len(s.components) == 1 and s.components[0].period == 2


def test_build_irreducible_rejects_bad_transient():
    spec = period2_spec(0.4)
    bad = spec.phi_q + 0.1 * np.outer(vec(np.diag([1.0, 0.0])), vec(np.diag([1.0, -1.0])))
    with pytest.raises(HypothesisError) as err:
        build_irreducible(IrreducibleSpec(2, spec.projections, spec.sigma, bad))
    assert err.value.hypothesis in ("4b", "4c")
    kill = 0.1 * np.outer(vec(np.diag([1.0, -1.0])), vec(np.diag([1.0, 0.0])))
    with pytest.raises(HypothesisError) as err:
        build_irreducible(IrreducibleSpec(2, spec.projections, spec.sigma, kill))
    assert err.value.hypothesis == "4c"


def test_period2_parameter_guard():
    with pytest.raises(ParameterError):
        period2_spec(0.75)
    with pytest.raises(ParameterError):
        period2_spec(0.0)


def test_irreducible_components_examples():
    comps = irreducible_components(depolarizing(2, 0.3))
    assert len(comps) == 1 and np.allclose(comps[0].projection, np.eye(2))
    rng = np.random.default_rng(7)
    phi = block_diagonal_channel([random_channel(2, rng=rng), random_channel(1, rng=rng)])
    comps = irreducible_components(phi)
    ranks = sorted(int(round(np.trace(c.projection).real)) for c in comps)
    assert ranks == [1, 2]
    big = [c for c in comps if np.trace(c.projection).real > 1.5][0]
    assert np.allclose(big.projection, np.diag([1, 1, 0]), atol=1e-8)


def test_ppt_faithful_channels_kill_off_diagonal_blocks():
    # candidates mix a block-diagonal channel with a block phase; only q = 1 should survive the PPT filter
    rng = np.random.default_rng(8)
    found = 0
    for _ in range(60):
        q = float(rng.choice([1.0, 0.95, 0.8]))
        base = block_diagonal_channel([regularize(random_channel(2, rng=rng), 0.6), identity(1)])
        v = np.diag([1.0, 1.0, np.exp(1j * rng.uniform(0.5, 3.0))])
        phase = np.kron(v.conj(), v)
        phi = Channel(q * base.transfer + (1 - q) * phase)
        if not ppt_check(phi.choi_state, (3, 3)).ppt_holds:
            continue
        found += 1
        s = classify(phi)
        assert s.is_faithful and len(s.components) == 2
        for a in s.components:
            for b in s.components:
                if a is b:
                    continue
                x = a.projection @ rng.standard_normal((3, 3)) @ b.projection
                assert np.linalg.norm(phi(x)) <= 1e-9
    assert found >= 3


def test_direct_sum_examples():
    d = direct_sum_of_primitive_check(depolarizing(2, 0.5))
    assert d.is_direct_sum and len(d.blocks) == 1
    d = direct_sum_of_primitive_check(irreducible_period2(0.5))
    assert not d.is_direct_sum and not d.nilpotent


def test_hadamard_cycle_keeps_coherences_under_iteration():
    # off-diagonal entries decay like eps^m but never vanish, so no power is a direct sum
    res = direct_sum_of_primitive_check(hadamard_cycle(4, 0.5))
    assert len(res.block_projections) == 4
    assert not res.is_direct_sum and not res.nilpotent
    assert 0 < res.offdiag_leakage < 1


def test_similarity_normalize_examples():
    rng = np.random.default_rng(9)
    phi = depolarizing(2, 0.3)
    sigma = np.eye(2) / 2
    assert np.allclose(similarity_normalize(phi, np.eye(2), sigma).transfer, phi.transfer)
    scaled = Channel(2.5 * phi.transfer, flags={"cp": phi.is_cp})
    assert np.allclose(similarity_normalize(scaled, np.eye(2), sigma).transfer, phi.transfer)
    # a CP map with eigenvectors x and sig built by conjugating a unital channel
    psi = random_channel(2, rng=rng)
    psi = Channel(0.5 * (psi.transfer + np.conj(psi.transfer)) * 0 + compose(psi, psi).transfer)
    s_inv = invariant_state(psi)
    x = random_state(2, rng) + 0.2 * np.eye(2)
    from ebtimes.linalg import gamma_superop

    cp = Channel(3.0 * gamma_superop(x, -1.0) @ psi.transfer @ gamma_superop(x, 1.0))
    sig = unvec(gamma_superop(x, -1.0) @ vec(s_inv), 2)
    n1 = similarity_normalize(cp, x, sig)
    cp2 = Channel(cp.transfer @ cp.transfer)
    n2 = similarity_normalize(cp2, x, sig)
    assert np.allclose(n2.transfer, n1.transfer @ n1.transfer, atol=1e-9)
    assert n1.is_cptp


def test_regularize_examples():
    rng = np.random.default_rng(10)
    phi = random_channel(2, rng=rng)
    eps = 0.2
    reg = regularize(phi, eps)
    flat = depolarizing(2, 0.0).transfer
    assert np.isclose(np.linalg.norm(reg.transfer - phi.transfer), eps * np.linalg.norm(phi.transfer - flat))
    reg = regularize(point(np.diag([1.0, 0.0])), 0.1)
    assert lambda_min(invariant_state(reg)) > 0
    with pytest.raises(ParameterError):
        regularize(phi, 1.0)


def test_regularize_preserves_ppt():
    rng = np.random.default_rng(11)
    kept = 0
    while kept < 5:
        phi = regularize(random_channel(2, rng=rng), 0.5)
        if not ppt_check(phi.choi_state, (2, 2)).ppt_holds:
            continue
        kept += 1
        for stage in ("faithful", "eeb"):
            assert ppt_check(regularize(phi, 0.1, stage).choi_state, (2, 2)).ppt_holds
