"""Downstream algorithm tests: cumulant energies, VQE, phase series, and
excited-state matrices, each checked against dense linear-algebra oracles."""
import math

import numpy as np
import pytest

from mcprep.algorithms import (
    CumulantSet,
    DegenerateCumulants,
    TauTooLarge,
    ZeroThirdCumulant,
    cmx2,
    cumulants,
    qcels_estimate,
    qcels_series,
    qcels_series_hadamard,
    qcm4,
    sceom_element_resources,
    sceom_energies,
    sceom_m_matrix,
    vqe_minimize,
)
from mcprep.configs import (
    ExcitationOp,
    OnConfig,
    apply_excitation,
    cisd_excitations,
    hamming,
    validate_spec,
)
from mcprep.givens import synthesize_gr
from mcprep.paulis import PauliSum, PauliWord
from mcprep.simulator import (
    StateVector,
    exact_spectrum,
    expectation,
    moments,
    run_circuit,
    subspace_diag,
)


def random_sum(rng, n: int, terms: int) -> PauliSum:
    pairs = [
        (
            float(rng.standard_normal()),
            PauliWord.from_string("".join(rng.choice(list("IXYZ"), n))),
        )
        for _ in range(terms)
    ]
    return PauliSum.from_terms(pairs, n)


def number_conserving_hamiltonian(rng, n: int) -> PauliSum:
    """Random weight-sector-preserving Hamiltonian: Z words plus symmetric
    hopping pairs with equal XX and YY coefficients."""
    pairs = []
    for i in range(n):
        pairs.append((float(rng.standard_normal()), "I" * i + "Z" + "I" * (n - i - 1)))
    for i in range(n):
        for j in range(i + 1, n):
            word = ["I"] * n
            word[i] = word[j] = "Z"
            pairs.append((float(rng.standard_normal()), "".join(word)))
            amp = float(rng.standard_normal()) / 2
            for letter in "XY":
                hop = ["I"] * n
                hop[i] = hop[j] = letter
                pairs.append((amp, "".join(hop)))
    return PauliSum.from_terms(pairs, n)


TWO_ORBITAL_SECTOR = ("1100", "0110", "1001", "0011")


def spin_conserving_hamiltonian(rng) -> PauliSum:
    """Four-qubit Hamiltonian (spins interleaved) preserving particle number
    and spin projection, so the two-electron singlet sector is closed."""
    pairs = []
    for i in range(4):
        pairs.append((float(rng.standard_normal()), "I" * i + "Z" + "I" * (4 - i - 1)))
    for i in range(4):
        for j in range(i + 1, 4):
            word = ["I"] * 4
            word[i] = word[j] = "Z"
            pairs.append((float(rng.standard_normal()), "".join(word)))
    for i, j in ((0, 2), (1, 3)):  # same-spin hopping only
        amp = float(rng.standard_normal()) / 2
        for letter in "XY":
            hop = ["I"] * 4
            hop[i] = hop[j] = letter
            pairs.append((amp, "".join(hop)))
    return PauliSum.from_terms(pairs, 4)


# --- cumulants and moment energies -------------------------------------------------


def test_worked_two_point_example():
    c = cumulants([0.8, 1.0, 0.8, 1.0])
    assert (c.c1, c.c2, c.c3, c.c4) == pytest.approx((0.8, 0.36, -0.576, 0.6624), abs=1e-14)
    assert qcm4(c) == pytest.approx(-1.0, abs=1e-12)
    assert cmx2(c) == pytest.approx(1.025, abs=1e-12)


def test_cumulants_input_validation():
    with pytest.raises(ValueError):
        cumulants([1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        cumulants([0.0, -1.0, 0.0, 1.0])  # negative variance


def test_eigenstate_cumulants_vanish_and_short_circuit():
    rng = np.random.default_rng(71)
    h = random_sum(rng, 4, 8)
    spectrum = exact_spectrum(h, with_vectors=True)
    k = int(rng.integers(0, 16))
    state = spectrum.vectors[:, k]
    c = cumulants(moments(state, h, 4))
    assert abs(c.c1 - spectrum.values[k]) < 1e-9
    assert abs(c.c2) < 1e-9 and abs(c.c3) < 1e-9 and abs(c.c4) < 1e-9
    near = CumulantSet(c.c1, max(c.c2, 0.0), c.c3, c.c4)
    assert qcm4(near) == near.c1
    assert cmx2(near) == near.c1


def test_qcm4_recovers_lower_energy_of_two_point_support():
    rng = np.random.default_rng(72)
    done = 0
    while done < 30:
        n = int(rng.integers(2, 6))
        h = random_sum(rng, n, 6)
        spectrum = exact_spectrum(h, with_vectors=True)
        i, j = sorted(rng.choice(1 << n, size=2, replace=False))
        if spectrum.values[j] - spectrum.values[i] < 0.1:
            continue
        p = float(rng.uniform(0.15, 0.85))
        state = math.sqrt(p) * spectrum.vectors[:, i] + math.sqrt(1 - p) * spectrum.vectors[:, j]
        c = cumulants(moments(state, h, 4))
        assert qcm4(c) == pytest.approx(spectrum.values[i], abs=1e-9)
        done += 1


def test_degenerate_cumulant_guards():
    # Symmetric heavy-tailed three-point distribution: zero skew, positive
    # excess kurtosis, so the root expression goes negative.
    heavy = CumulantSet(0.0, 1.0, 0.0, 1.0)
    with pytest.raises(DegenerateCumulants):
        qcm4(heavy)
    with pytest.raises(ZeroThirdCumulant):
        cmx2(heavy)
    flat = CumulantSet(0.0, 1.0, 1.0, 1.0)  # c3^2 == c2 c4 kills the denominator
    assert 3 * flat.c3**2 - 2 * flat.c2 * flat.c4 > 0
    with pytest.raises(DegenerateCumulants):
        qcm4(flat)


def test_degenerate_guard_from_real_moments():
    # Eigenvalues {-2, 0, 2} with weights {1/8, 3/4, 1/8} on one qubit padded
    # into a diagonal Hamiltonian give c3 = 0, c4 = 1.
    values = np.array([-2.0, 0.0, 0.0, 2.0])
    weights = np.array([0.125, 0.375, 0.375, 0.125])
    mu = [float((weights * values**m).sum()) for m in range(1, 5)]
    c = cumulants(mu)
    assert c.c3 == pytest.approx(0.0, abs=1e-14)
    assert c.c4 == pytest.approx(1.0, abs=1e-14)
    with pytest.raises(DegenerateCumulants):
        qcm4(c)


# --- variational minimization --------------------------------------------------------


def test_vqe_reaches_subspace_ground_energy_both_methods():
    rng = np.random.default_rng(73)
    configs = [OnConfig.from_string(s) for s in TWO_ORBITAL_SECTOR]
    spec = validate_spec([(0.5, s) for s in TWO_ORBITAL_SECTOR])
    for _ in range(5):
        h = number_conserving_hamiltonian(rng, 4)
        exact = subspace_diag(h, configs).values[0]
        gr = vqe_minimize(h, spec, method="gr", seed=7)
        ssp = vqe_minimize(h, spec, method="ssp", seed=7)
        assert gr.energy == pytest.approx(exact, abs=1e-6)
        assert ssp.energy == pytest.approx(exact, abs=1e-6)
        assert abs(gr.energy - ssp.energy) < 1e-6
        assert gr.method == "gr" and ssp.method == "ssp"
        assert expectation(gr.state, h) == pytest.approx(gr.energy, abs=1e-9)


def test_vqe_single_configuration_has_no_parameters():
    rng = np.random.default_rng(74)
    h = number_conserving_hamiltonian(rng, 3)
    spec = validate_spec([(1.0, "110")])
    result = vqe_minimize(h, spec)
    assert result.parameters == {}
    assert result.restarts_used == 0
    assert result.energy == pytest.approx(
        expectation(StateVector.basis_state(OnConfig.from_string("110")), h), abs=1e-12
    )


def test_vqe_rejects_unknown_method():
    h = PauliSum.from_terms([(1.0, "ZZ")])
    spec = validate_spec([(1.0, "10")])
    with pytest.raises(ValueError):
        vqe_minimize(h, spec, method="annealing")


# --- phase-series estimation ----------------------------------------------------------


def test_qcels_recovers_eigenvalue_from_eigenstate():
    rng = np.random.default_rng(75)
    for _ in range(5):
        n = int(rng.integers(2, 5))
        h = random_sum(rng, n, 6)
        spectrum = exact_spectrum(h, with_vectors=True)
        k = int(rng.integers(0, 1 << n))
        state = StateVector(spectrum.vectors[:, k].astype(complex), n)
        spread = spectrum.values[-1] - spectrum.values[0]
        tau = 0.9 * 2 * math.pi / spread
        series = qcels_series(state, h, tau, 24)
        assert abs(qcels_estimate(series) - spectrum.values[k]) < 1e-10


def test_qcels_hadamard_series_matches_direct_series():
    rng = np.random.default_rng(76)
    h = random_sum(rng, 3, 5)
    amps = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    amps /= np.linalg.norm(amps)
    state = StateVector(amps, 3)
    spread = _spread(h)
    tau = 0.5 * 2 * math.pi / spread
    direct = qcels_series(state, h, tau, 16)
    interferometric = qcels_series_hadamard(state, h, tau, 16)
    assert np.abs(direct.values - interferometric.values).max() < 1e-10
    assert direct.shift == interferometric.shift


def _spread(h: PauliSum) -> float:
    values = exact_spectrum(h).values
    return float(values[-1] - values[0])


def test_qcels_restores_identity_shift():
    rng = np.random.default_rng(77)
    base = random_sum(rng, 3, 5)
    shifted = base.shifted(17.5)
    spectrum = exact_spectrum(base, with_vectors=True)
    state = StateVector(spectrum.vectors[:, 0].astype(complex), 3)
    tau = 0.8 * 2 * math.pi / _spread(base)
    series = qcels_series(state, shifted, tau, 24)
    assert series.shift == pytest.approx(17.5)
    assert abs(qcels_estimate(series) - (spectrum.values[0] + 17.5)) < 1e-9


def test_qcels_rejects_bad_sampling():
    rng = np.random.default_rng(78)
    h = random_sum(rng, 3, 5)
    state = StateVector.zero_state(3)
    with pytest.raises(TauTooLarge):
        qcels_series(state, h, 2 * math.pi / _spread(h) + 1.0, 8)
    with pytest.raises(ValueError):
        qcels_series(state, h, -0.1, 8)
    with pytest.raises(ValueError):
        qcels_series(state, h, 0.1, 1)


# --- excited-state matrices ---------------------------------------------------------


def exact_ground_ansatz(h: PauliSum, hf: OnConfig):
    """Rotation ansatz preparing the closed-sector ground state from |hf>."""
    configs = [OnConfig.from_string(s) for s in TWO_ORBITAL_SECTOR]
    spectrum = subspace_diag(h, configs, with_vectors=True)
    ground = np.real(spectrum.vectors[:, 0])
    assert np.abs(np.imag(spectrum.vectors[:, 0])).max() < 1e-12
    if abs(ground[0]) < 1e-6:
        return None, None
    if ground[0] < 0:
        ground = -ground
    spec = validate_spec(
        [(float(ground[k]), configs[k]) for k in range(4) if abs(ground[k]) > 1e-13]
    )
    # reference first: keep hf in front without reordering
    assert spec.configs[0] == hf
    return synthesize_gr(spec, include_reference_prep=False), spectrum


def test_sceom_matrix_reproduces_exact_excitation_energies():
    rng = np.random.default_rng(79)
    hf = OnConfig.from_string("1100")
    done = 0
    while done < 4:
        h = spin_conserving_hamiltonian(rng)
        ansatz, spectrum = exact_ground_ansatz(h, hf)
        if ansatz is None:
            continue
        excitations = cisd_excitations(hf)
        for prep in ("gr", "ssp"):
            m = sceom_m_matrix(h, hf, excitations, ansatz, prep_method=prep)
            assert np.max(np.abs(m.values - m.values.T)) < 1e-9
            assert m.ground_energy == pytest.approx(spectrum.values[0], abs=1e-9)
            energies = sceom_energies(m)
            expected = spectrum.values[1:] - spectrum.values[0]
            assert np.allclose(energies, expected, atol=1e-6)
        done += 1


def test_sceom_off_diagonal_reconstruction_identity():
    rng = np.random.default_rng(80)
    hf = OnConfig.from_string("1100")
    h = spin_conserving_hamiltonian(rng)
    ansatz, _ = exact_ground_ansatz(h, hf)
    assert ansatz is not None
    excitations = cisd_excitations(hf)
    m = sceom_m_matrix(h, hf, excitations, ansatz)
    dense = h.matrix()
    for a, op_a in enumerate(m.excitations):
        xa, sa = apply_excitation(op_a, hf)
        phi_a = run_circuit(ansatz, StateVector.basis_state(xa)).amps
        for b in range(a + 1, len(m.excitations)):
            xb, sb = apply_excitation(m.excitations[b], hf)
            phi_b = run_circuit(ansatz, StateVector.basis_state(xb)).amps
            direct = sa * sb * np.vdot(phi_a, dense @ phi_b).real
            assert m.values[a, b] == pytest.approx(direct, abs=1e-9)


def test_sceom_rejects_invalid_probes():
    hf = OnConfig.from_string("1100")
    h = PauliSum.from_terms([(1.0, "ZZII")])
    ansatz = synthesize_gr(validate_spec([(1.0, hf)]), include_reference_prep=False)
    with pytest.raises(ValueError):
        sceom_m_matrix(h, hf, [ExcitationOp((2,), (0,))], ansatz)  # annihilates empty mode
    colliding = [ExcitationOp((0,), (2,)), ExcitationOp((0,), (2,))]
    with pytest.raises(ValueError):
        sceom_m_matrix(h, hf, colliding, ansatz)
    with pytest.raises(ValueError):
        sceom_m_matrix(h, hf, cisd_excitations(hf), ansatz, prep_method="magic")


def test_sceom_energies_validates_symmetry():
    lopsided = np.array([[1.0, 2.0], [0.0, 1.0]])
    with pytest.raises(ValueError):
        sceom_energies(lopsided)
    fine = np.array([[2.0, 0.5], [0.5, 1.0]])
    assert sceom_energies(fine) == pytest.approx(np.linalg.eigvalsh(fine))
    with pytest.raises(ValueError):
        sceom_energies(np.zeros((2, 3)))


def test_sceom_element_resources_favor_sparse_method():
    hf = OnConfig.from_string("11110000")
    ops = cisd_excitations(hf)
    rows = sceom_element_resources(hf, ops)
    assert rows
    for row in rows:
        assert row.ssp_two_qubit <= row.gr_two_qubit
        xa, _ = apply_excitation(ops[row.i], hf)
        xb, _ = apply_excitation(ops[row.j], hf)
        assert row.pair_distance == hamming(xa, xb)
    # Costlier pairs sit at larger Hamming separations on average.
    distances: dict[int, list[int]] = {}
    for row in rows:
        distances.setdefault(row.pair_distance, []).append(row.gr_two_qubit)
    means = {d: float(np.mean(v)) for d, v in distances.items()}
    ordered = sorted(means)
    assert all(means[a] <= means[b] for a, b in zip(ordered, ordered[1:]))
