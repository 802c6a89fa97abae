"""Smoke and consistency tests for the python bindings.

The heavy numerical verification lives in the C++ suites; here we check that
every bound operation is reachable from python, agrees with frozen reference
digits, and raises the mapped exception types.
"""
import math

import pytest

import kdvist as kv

# Frozen reference digits for the depth-4 well on [-4, 0] (single block),
# cross-checked against closed forms in the C++ suites.
KAPPA_REF = [1.899448036751944, 1.571342556813314, 0.876610362727433]
C2_REF = [0.038798932148319, 0.145167980693995, 0.257227284424067]


def block_well():
    return kv.single_block(2.0, -4.0, 0.0)


def block_spectrum():
    pot = block_well()
    seeds = kv.spectral_seed(pot, 256, -10.0, 10.0)
    kappas, diag = kv.find_bound_states(pot, seeds, kv.BoundMethod.q_zero)
    return pot, kappas, diag


def test_blocks_and_profiles():
    pot = block_well()
    assert len(pot) == 1
    assert pot.span() == pytest.approx(4.0)
    assert kv.potential_value(pot, -2.0) == pytest.approx(-4.0)
    assert kv.potential_value(pot, 1.0) == 0.0

    prof = kv.named_profile("sech2", 2.0, 1.0, -5.0, 5.0)
    assert prof(0.0) == pytest.approx(-2.0)
    blocks = kv.to_blocks(prof, 1000, kv.BlockRule.midpoint)
    assert len(blocks) == 1000
    assert blocks.wells[0].width == pytest.approx(0.01)

    tab = kv.tabulated_profile([(-1.0, -2.0), (1.0, -2.0)])
    assert tab(0.5) == pytest.approx(-2.0)

    custom = kv.SampledPotential(lambda x: -1.0 - 0.1 * x, -2.0, 2.0)
    b2 = kv.to_blocks(custom, 4, kv.BlockRule.cell_average)
    assert len(b2) == 4


def test_bound_states_match_reference():
    _, kappas, diag = block_spectrum()
    assert kappas == pytest.approx(KAPPA_REF, abs=1e-12)
    assert diag.failed_seeds == []


def test_norming_constants_match_reference():
    pot, kappas, _ = block_spectrum()
    spec = kv.norming_constants(pot, kappas, kv.NormingMethod.residue)
    assert spec.norming == pytest.approx(C2_REF, abs=1e-11)
    spec2 = kv.norming_constants(pot, kappas, kv.NormingMethod.ab_ratio, 1e-3)
    assert spec2.norming == pytest.approx(spec.norming, rel=1e-4)


def test_transition_matrix_unitarity():
    pot = block_well()
    for k in (0.3, 1.1, 4.7):
        lam = kv.compose_lambda(complex(k, 0.0), pot)
        s = abs(lam.R()) ** 2 + abs(lam.T()) ** 2
        assert s == pytest.approx(1.0, abs=1e-13)


def test_haar_roundtrip():
    values = [math.sin(0.1 * i) - 2.0 for i in range(64)]
    coeffs = kv.haar_forward(values)
    assert coeffs.level == 6
    back = kv.haar_inverse(coeffs)
    assert back == pytest.approx(values, abs=1e-13)

    prof = kv.named_profile("block", 4.0, 1.0, -4.0, 0.0)
    comp = kv.haar_compress(prof, 3, 0.0)
    assert len(comp) == 8
    assert comp.wells[0].depth() == pytest.approx(-4.0)


def test_soliton_train_closed_form():
    spec = kv.DiscreteSpectrum([1.0], [2.0])
    train = kv.evolve(spec, 0.5)
    assert train.gammas == pytest.approx([1.0])
    xs = [(-6.0 + 0.05 * i) for i in range(321)]
    u = kv.u_asymptotic(train, xs)
    ref = [-2.0 / math.cosh(x - 2.0) ** 2 for x in xs]
    assert u == pytest.approx(ref, abs=1e-12)

    udet = kv.u_determinant(spec, 0.5, xs, 1e-3)
    assert max(abs(a - b) for a, b in zip(udet, ref)) < 1e-5


def test_glm_kernel():
    spec = kv.DiscreteSpectrum([1.0], [2.0])
    terms = kv.glm_terms(spec, 0.0)
    assert len(terms.terms) == 1
    assert terms.terms[0][0] == pytest.approx(2.0)
    assert terms.terms[0][1] == pytest.approx(1.0)
    assert kv.glm_kernel(spec, 0.0, 0.0) == pytest.approx(2.0)


def test_split_step_translates_soliton():
    prof = kv.named_profile("sech2", 2.0, 1.0, -8.0, 8.0)
    res = kv.split_step_kdv(prof, 0.25, 1e-4, 1024)
    assert res.mass1 == pytest.approx(res.mass0, rel=1e-8)
    assert res.momentum1 == pytest.approx(res.momentum0, rel=1e-6)
    err = max(abs(u + 2.0 / math.cosh(x - 1.0) ** 2) for x, u in zip(res.xs, res.u))
    assert err < 5e-3


def test_oracle_paths():
    pot = block_well()
    ab = kv.ab_by_integration(complex(1.3, 0.0), pot, 1e-3)
    lam = kv.compose_lambda(complex(1.3, 0.0), pot)
    assert abs(ab.a - lam.a()) < 1e-6
    nl2 = kv.norming_by_L2(KAPPA_REF[0], pot, 1e-3)
    assert nl2.c2 == pytest.approx(C2_REF[0], rel=1e-6)


def test_exceptions_are_mapped():
    with pytest.raises(ValueError):
        kv.single_block(-1.0, -2.0, 0.0)
    with pytest.raises(kv.InvalidInput):
        kv.named_profile("triangle", 1.0, 1.0, -1.0, 1.0)
    with pytest.raises(ValueError):
        kv.evolve(kv.DiscreteSpectrum([1.0, 1.0], [2.0, 2.0]), 1.0)
    assert issubclass(kv.NumericalError, ArithmeticError)
