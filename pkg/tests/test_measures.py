import math

import numpy as np
import pytest

from coherlab.exceptions import BadSubsystemError, DimensionTooLargeError
from coherlab.linalg import (
    DensityMatrix,
    PureState,
    partial_trace,
    relative_entropy,
    trace_norm,
    von_neumann_entropy,
)
from coherlab.measures import (
    Bipartition,
    MeasureReport,
    basis_dependent_discord,
    binary_entropy,
    c_r,
    coherence_of_assistance,
    continuity_bound,
    dephase,
    distillable_coherence,
    mutual_information,
    qi_relative_entropy,
    qi_relative_entropy_oracle,
)
from coherlab.states import (
    bell_states,
    maximally_coherent,
    random_density,
    random_pure,
    random_qi_state,
)

AB = Bipartition((0,), (1,))


def dephase_oracle(mat, dims, subsystems):
    """Direct index-zeroing definition of the dephasing map."""
    out = mat.copy()
    n = mat.shape[0]
    for row in range(n):
        for col in range(n):
            mrow = np.unravel_index(row, dims)
            mcol = np.unravel_index(col, dims)
            if any(mrow[s] != mcol[s] for s in subsystems):
                out[row, col] = 0.0
    return out


# ---------------------------------------------------------------------------
# Bipartition / MeasureReport


def test_bipartition_parse():
    split = Bipartition.parse("A=0;B=1,2")
    assert split.a == (0,) and split.b == (1, 2)
    split = Bipartition.parse("B=0,1")
    assert split.a == () and split.b == (0, 1)


def test_bipartition_validation():
    with pytest.raises(BadSubsystemError):
        Bipartition((0,), ())
    with pytest.raises(BadSubsystemError):
        Bipartition((0,), (0,))
    with pytest.raises(BadSubsystemError):
        Bipartition((0,), (1,)).validate(3)


def test_measure_report_clamps_rounding():
    report = MeasureReport("cr", -5e-10, {})
    assert report.value == 0.0
    from coherlab.exceptions import InternalConsistencyError

    with pytest.raises(InternalConsistencyError):
        MeasureReport("cr", -1e-6, {})


# ---------------------------------------------------------------------------
# dephase


def test_dephase_diagonal_fixed_point():
    rho = DensityMatrix(np.diag([0.4, 0.6]).astype(complex), (2,))
    out = dephase(rho, (0,))
    assert np.abs(out.mat - rho.mat).max() < 1e-15


def test_dephase_psi2_gives_maximally_mixed():
    rho = maximally_coherent(2).to_density()
    out = dephase(rho, (0,))
    assert np.abs(out.mat - np.eye(2) / 2).max() < 1e-12


def test_dephase_bell_on_b_matches_oracle():
    bell = bell_states()[0].to_density()
    out = dephase(bell, (1,))
    expected = np.zeros((4, 4), dtype=complex)
    expected[0, 0] = expected[3, 3] = 0.5
    assert np.abs(out.mat - expected).max() < 1e-12
    assert np.abs(out.mat - dephase_oracle(bell.mat, bell.dims, (1,))).max() < 1e-12


def test_dephase_random_matches_oracle():
    rho = random_density((2, 3), 6, 8)
    for subsystems in [(0,), (1,), (0, 1)]:
        out = dephase(rho, subsystems)
        assert np.abs(out.mat - dephase_oracle(rho.mat, rho.dims, subsystems)).max() < 1e-12


def test_dephase_idempotent():
    for seed in range(10):
        rho = random_density((2, 2), 4, seed)
        once = dephase(rho, (1,))
        twice = dephase(once, (1,))
        assert np.abs(once.mat - twice.mat).max() < 1e-12


def test_dephase_empty_set_is_identity():
    rho = random_density((2, 2), 4, 3)
    assert dephase(rho, ()) is rho


# ---------------------------------------------------------------------------
# c_r


def test_cr_psi2_is_one():
    assert abs(c_r(maximally_coherent(2).to_density()) - 1.0) < 1e-12


def test_cr_diagonal_is_zero():
    rho = DensityMatrix(np.diag([0.2, 0.3, 0.5]).astype(complex), (3,))
    assert c_r(rho) == 0.0


def test_cr_mixture_against_grid_minimization_oracle():
    # State: half |psi2><psi2| + half |0><0|; the closed form must match
    # the minimum of S(rho || sigma) over a dense grid of diagonal sigma.
    psi2 = maximally_coherent(2).to_density()
    zero = DensityMatrix(np.diag([1.0, 0.0]).astype(complex), (2,))
    rho = DensityMatrix(0.5 * psi2.mat + 0.5 * zero.mat, (2,))
    closed = c_r(rho)
    qs = np.linspace(1e-6, 1 - 1e-6, 4001)
    grid = min(
        relative_entropy(rho, DensityMatrix(np.diag([q, 1 - q]).astype(complex), (2,)))
        for q in qs
    )
    assert closed <= grid + 1e-12
    assert abs(closed - grid) < 1e-6
    # direct eigenvalue evaluation of the same value
    direct = von_neumann_entropy(np.diag(np.diag(rho.mat))) - von_neumann_entropy(rho)
    assert abs(closed - direct) < 1e-12


def test_cr_equals_relative_entropy_to_dephased():
    for seed in range(20):
        rho = random_density((2, 2), 4, seed)
        assert abs(c_r(rho) - relative_entropy(rho, dephase(rho, (0, 1)))) < 1e-9


def test_distillable_coherence_alias():
    assert distillable_coherence is c_r


# ---------------------------------------------------------------------------
# QI relative entropy


def test_qire_zero_on_qi_states():
    for seed in range(10):
        assert qi_relative_entropy(random_qi_state((2, 2), seed), AB) < 1e-10


def test_qire_bell_is_one():
    assert abs(qi_relative_entropy(bell_states()[0].to_density(), AB) - 1.0) < 1e-12


def test_qire_equals_relative_entropy_identity():
    # Closed form vs direct relative entropy on 200 random bipartite states.
    rng = np.random.default_rng(0)
    for _ in range(200):
        dims = (int(rng.integers(2, 4)), int(rng.integers(2, 4)))
        rho = random_density(dims, int(np.prod(dims)), int(rng.integers(2**31)))
        closed = qi_relative_entropy(rho, AB)
        direct = relative_entropy(rho, dephase(rho, (1,)))
        assert abs(closed - direct) < 1e-9


def test_qire_additive_over_tensor_products():
    for seed in range(10):
        rho = random_density((2, 2), 4, seed)
        sigma = random_density((2, 2), 4, seed + 100)
        joint = rho.tensor(sigma)
        split = Bipartition((0, 2), (1, 3))
        total = qi_relative_entropy(joint, split)
        parts = qi_relative_entropy(rho, AB) + qi_relative_entropy(sigma, AB)
        assert abs(total - parts) < 1e-9


def test_qire_faithful():
    for seed in range(20):
        rho = random_density((2, 2), 4, seed)
        value = qi_relative_entropy(rho, AB)
        gap = trace_norm(rho.mat - dephase(rho, (1,)).mat)
        if value < 1e-12:
            assert gap <= 1e-8
        if gap <= 1e-10:
            assert value < 1e-8
    qi = random_qi_state((2, 2), 7)
    assert qi_relative_entropy(qi, AB) < 1e-10
    assert trace_norm(qi.mat - dephase(qi, (1,)).mat) <= 1e-8


def test_cr_upper_bounds_qire():
    # Dephasing more subsystems cannot decrease the entropy gap.
    for seed in range(20):
        rho = random_density((2, 2), 4, seed)
        assert c_r(rho) >= qi_relative_entropy(rho, AB) - 1e-9
        assert c_r(rho) >= qi_relative_entropy(rho, Bipartition((1,), (0,))) - 1e-9


def test_qire_pure_state_equals_dephased_marginal_entropy():
    for seed in range(10):
        psi = random_pure((2, 3), seed)
        rho_b = partial_trace(psi.to_density(), {1})
        lhs = qi_relative_entropy(psi.to_density(), AB)
        rhs = von_neumann_entropy(dephase(rho_b, (0,)))
        assert abs(lhs - rhs) < 1e-10


# ---------------------------------------------------------------------------
# oracle


def test_oracle_near_zero_for_qi_input():
    rho = random_qi_state((2, 2), 1)
    assert qi_relative_entropy_oracle(rho, AB, starts=6, seed=0) < 1e-4


def test_oracle_matches_closed_form_on_bell():
    bell = bell_states()[0].to_density()
    oracle = qi_relative_entropy_oracle(bell, AB, starts=8, seed=0)
    assert abs(oracle - 1.0) < 1e-3


def test_oracle_rejects_large_dimension():
    with pytest.raises(DimensionTooLargeError):
        qi_relative_entropy_oracle(random_density((4, 5), 4, 0), AB)


def test_oracle_agreement_band_small_batch():
    rng = np.random.default_rng(5)
    for _ in range(5):
        rho = random_density((2, 2), int(rng.integers(1, 5)), int(rng.integers(2**31)))
        closed = qi_relative_entropy(rho, AB)
        oracle = qi_relative_entropy_oracle(rho, AB, starts=8, seed=1)
        assert -1e-4 <= oracle - closed <= 1e-2


# ---------------------------------------------------------------------------
# mutual information and discord


def test_bell_discord_values():
    bell = bell_states()[0].to_density()
    assert abs(mutual_information(bell, AB) - 2.0) < 1e-12
    assert abs(mutual_information(dephase(bell, (1,)), AB) - 1.0) < 1e-12
    assert abs(basis_dependent_discord(bell, AB) - 1.0) < 1e-12


def test_discord_zero_on_product_states():
    rho = random_density((2,), 2, 1).tensor(random_density((2,), 2, 2))
    assert basis_dependent_discord(rho, AB) < 1e-10


def test_discord_zero_on_qi_states():
    for seed in range(10):
        assert basis_dependent_discord(random_qi_state((2, 2), seed), AB) < 1e-9


def test_mutual_information_nonnegative():
    for seed in range(20):
        rho = random_density((2, 3), 6, seed)
        assert mutual_information(rho, AB) >= 0.0


# ---------------------------------------------------------------------------
# coherence of assistance


def test_assistance_pure_state_is_cr():
    rho = random_density((2,), 1, 9)
    value, ensemble = coherence_of_assistance(rho, budget=1, seed=0)
    assert abs(value - c_r(rho)) < 1e-12
    assert len(ensemble) == 1 and abs(ensemble[0][0] - 1.0) < 1e-12


def test_assistance_maximally_mixed_qubit_reaches_one():
    rho = DensityMatrix(np.eye(2) / 2, (2,))
    value, ensemble = coherence_of_assistance(rho, budget=8, seed=0)
    assert value >= 1.0 - 1e-8
    # exhibit the plus/minus ensemble explicitly: it attains the bound
    plus = PureState(np.array([1, 1]) / math.sqrt(2), (2,))
    minus = PureState(np.array([1, -1]) / math.sqrt(2), (2,))
    explicit = 0.5 * c_r(plus.to_density()) + 0.5 * c_r(minus.to_density())
    assert abs(explicit - 1.0) < 1e-12
    avg = sum(p * np.outer(s.vec, s.vec.conj()) for p, s in ensemble)
    assert np.abs(avg - rho.mat).max() < 1e-8


def test_assistance_between_cr_and_dephased_entropy():
    for seed in range(6):
        rho = random_density((2,), 2, seed)
        value, ensemble = coherence_of_assistance(rho, budget=2, seed=seed)
        assert value <= von_neumann_entropy(dephase(rho, (0,))) + 1e-9
        assert value >= c_r(rho) - 1e-9
        avg = sum(p * np.outer(s.vec, s.vec.conj()) for p, s in ensemble)
        assert np.abs(avg - rho.mat).max() < 1e-8


# ---------------------------------------------------------------------------
# continuity bound


def test_continuity_bound_zero_for_equal_states():
    rho = random_density((2, 2), 4, 1)
    assert continuity_bound(rho, rho, AB) < 1e-12


def test_continuity_bound_bell_vs_dephased():
    bell = bell_states()[0].to_density()
    dephased = dephase(bell, (0, 1))
    t = trace_norm(bell.mat - dephased.mat) / 2
    assert abs(t - 0.5) < 1e-12
    bound = continuity_bound(bell, dephased, AB)
    assert abs(bound - 4.0) < 1e-12
    diff = abs(qi_relative_entropy(bell, AB) - qi_relative_entropy(dephased, AB))
    assert diff <= bound


@pytest.mark.filterwarnings("ignore::UserWarning")
def test_continuity_bound_dominates_difference():
    rng = np.random.default_rng(3)
    for _ in range(30):
        rho = random_density((2, 2), 4, int(rng.integers(2**31)))
        sigma = random_density((2, 2), 4, int(rng.integers(2**31)))
        diff = abs(qi_relative_entropy(rho, AB) - qi_relative_entropy(sigma, AB))
        assert diff <= continuity_bound(rho, sigma, AB) + 1e-12


def test_continuity_bound_flags_large_t():
    zero = DensityMatrix(np.diag([1.0, 0.0]).astype(complex), (2,))
    one = DensityMatrix(np.diag([0.0, 1.0]).astype(complex), (2,))
    with pytest.warns(UserWarning):
        continuity_bound(zero, one)


def test_binary_entropy_edges():
    assert binary_entropy(0.0) == 0.0
    assert binary_entropy(1.0) == 0.0
    assert abs(binary_entropy(0.5) - 1.0) < 1e-15
    assert abs(binary_entropy(0.25) - (2.0 - 0.75 * math.log2(3.0))) < 1e-12
