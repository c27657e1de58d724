import numpy as np
import numpy.testing as npt
import pytest
from hypothesis import given
from hypothesis import strategies as st

from passivecones.matcore import PoleMarker
from passivecones.ratfun import (
    S,
    FailureReason,
    Generator,
    GridSpec,
    Inverse,
    Leaf,
    RationalMatrixFunction,
    Scale,
    SingularFunctionError,
    Sum,
    block,
    cic_eval,
    cic_sample,
    constant,
    diag,
    feedback_network,
    identity,
    ladder_impedance,
    maximality_counterexample,
    phi,
    pr_check,
    ratio,
    rf_add,
    rf_eval,
    rf_invert,
    rf_scale,
    rhp_poles,
    scalar,
    sub_block,
    tree_depth,
    tree_to_json,
)

from .oracles import feedback_transfer, fig3_impedance, poly_eval_ascending

seeds = st.integers(min_value=0, max_value=2**31 - 1)
pos = st.floats(0.05, 20.0)
F_ONE_OVER_S = scalar([1.0], [0.0, 1.0])
G_ONE = scalar([1.0])


def h_family(a, b, d):
    """``d + b/(s + a)``."""
    return scalar([a * d + b, d], [a, 1.0])


def sample_points(rng, k=20):
    return rng.uniform(-3, 3, k) + 1j * rng.uniform(-3, 3, k)


class TestReduction:
    def test_cancels_common_root(self):
        f = ratio(np.polynomial.polynomial.polyfromroots([1.0, -2.0]),
                  np.polynomial.polynomial.polyfromroots([1.0, -3.0]))
        assert f.degrees == (1, 1)
        npt.assert_allclose(f.den, [3.0, 1.0])

    def test_cancels_powers_of_s(self):
        f = ratio([0.0, 0.0, 2.0], [0.0, 1.0])
        npt.assert_allclose(f.num, [0.0, 2.0])
        npt.assert_allclose(f.den, [1.0])

    def test_monic_denominator(self):
        f = ratio([2.0], [4.0, 2.0])
        npt.assert_allclose(f.den, [2.0, 1.0])
        npt.assert_allclose(f.num, [1.0])

    def test_zero_denominator_rejected(self):
        with pytest.raises((ValueError, ZeroDivisionError)):
            ratio([1.0], [0.0])


class TestEvaluation:
    def test_one_over_s(self):
        assert rf_eval(F_ONE_OVER_S, 2)[0, 0] == pytest.approx(0.5)

    def test_h_at_one(self):
        assert rf_eval(h_family(1, 4, 2), 1)[0, 0] == pytest.approx(4.0)

    def test_pole_marker(self):
        assert isinstance(rf_eval(F_ONE_OVER_S, 0), PoleMarker)

    def test_large_argument_stable(self):
        f = scalar([1.0, 0.0, 0.0, 0.0, 1.0], [2.0, 0.0, 0.0, 0.0, 1.0])
        assert rf_eval(f, 1e80)[0, 0] == pytest.approx(1.0)

    @given(seeds, st.integers(0, 5), st.integers(0, 5))
    def test_matches_polynomial_ratio(self, seed, dn, dd):
        rng = np.random.default_rng(seed)
        num, den = rng.standard_normal(dn + 1), rng.standard_normal(dd + 1)
        den[-1] = 1.0 + abs(den[-1])
        f = ratio(num, den)
        for s in sample_points(rng, 5):
            ref = poly_eval_ascending(num, s) / poly_eval_ascending(den, s)
            val = f(s)
            if isinstance(val, PoleMarker) or abs(poly_eval_ascending(den, s)) < 1e-3:
                continue
            assert abs(val - ref) <= 1e-7 * max(1.0, abs(ref))


class TestAlgebra:
    def test_invert_one_over_s(self):
        assert rf_invert(F_ONE_OVER_S).allclose(scalar([0.0, 1.0]))

    def test_invert_diagonal(self):
        out = rf_invert(diag([ratio([1.0], [0.0, 1.0]), constant(1.0)]))
        assert out.allclose(diag([S, constant(1.0)]))

    def test_assemble_h_from_generators(self):
        a, b, d = 1.0, 4.0, 2.0
        h = rf_add(rf_scale(d, G_ONE),
                   rf_scale(b, rf_invert(rf_add(rf_scale(a, G_ONE),
                                                rf_invert(F_ONE_OVER_S)))))
        assert h.allclose(h_family(a, b, d))

    def test_cic_scale_must_be_positive(self):
        with pytest.raises(ValueError):
            rf_scale(-1.0, G_ONE, cic=True)

    def test_singular_inverse(self):
        with pytest.raises(SingularFunctionError):
            RationalMatrixFunction(((constant(1.0), constant(1.0)),
                                    (constant(1.0), constant(1.0)))).inverse()

    @given(seeds, st.integers(1, 3))
    def test_inverse_times_self_is_identity(self, seed, m):
        rng = np.random.default_rng(seed)
        F = RationalMatrixFunction(tuple(
            tuple(ratio(rng.standard_normal(2), [rng.uniform(0.5, 2), 1.0]) for _ in range(m))
            for _ in range(m)))
        try:
            Finv = F.inverse()
        except SingularFunctionError:
            return
        for s in sample_points(rng, 4):
            a, b = F(s), Finv(s)
            if isinstance(a, PoleMarker) or isinstance(b, PoleMarker):
                continue
            if np.linalg.cond(a) > 1e6:
                continue
            # degree grows like m**2 with clustered poles; evaluation loses digits
            npt.assert_allclose(a @ b, np.eye(m), atol=1e-6)

    @given(seeds)
    def test_sum_and_product_pointwise(self, seed):
        rng = np.random.default_rng(seed)
        f = scalar(rng.standard_normal(3), [rng.uniform(1, 2), rng.uniform(1, 2), 1.0])
        g = scalar(rng.standard_normal(2), [rng.uniform(1, 2), 1.0])
        for s in sample_points(rng, 5):
            fv, gv = f(s)[0, 0], g(s)[0, 0]
            assert (f + g)(s)[0, 0] == pytest.approx(fv + gv, rel=1e-8, abs=1e-10)
            assert (f @ g)(s)[0, 0] == pytest.approx(fv * gv, rel=1e-8, abs=1e-10)

    def test_block_and_sub_block(self):
        F = block([[identity(1), F_ONE_OVER_S], [G_ONE * 2.0, S * 1.0]])
        assert F.m == 2
        assert sub_block(F, 0, 1, 1).allclose(F_ONE_OVER_S)


class TestPhi:
    def test_scalar(self):
        assert phi(1.0, 0.0) == pytest.approx(1.0)

    def test_matrix(self):
        x = np.diag([1.0, 2.0])
        npt.assert_allclose(phi(x, np.eye(2)), np.linalg.inv(np.linalg.inv(x) + np.eye(2)))

    def test_series_branch(self):
        ca, lb = 2.0, 3.0
        out = phi(S * ca, S * lb)
        # (1/(s Ca) + s Lb)^-1 = s Ca / (1 + s^2 Ca Lb)
        assert out.allclose(scalar([0.0, ca], [1.0, 0.0, ca * lb]))

    def test_fig3_equal_elements(self):
        zin = phi(phi(S * 1.0, S * 1.0), phi(S * 1.0, S * 1.0))
        assert zin.allclose(ladder_impedance(
            {"topology": "fig3", "values": {"Ca": 1, "Lb": 1, "Lc": 1, "Cd": 1}}))


class TestCic:
    def test_generator_g(self):
        assert cic_eval(Generator("g")).allclose(constant(1.0))

    def test_double_inverse(self):
        assert cic_eval(Inverse(Inverse(Generator("f")))).allclose(F_ONE_OVER_S)

    def test_h_family_tree(self):
        a, b, d = 0.5, 3.0, 1.5
        tree = Sum((Scale(d, Generator("g")),
                    Scale(b, Inverse(Sum((Scale(a, Generator("g")),
                                          Inverse(Generator("f"))))))))
        assert cic_eval(tree).allclose(h_family(a, b, d))
        assert tree_depth(tree) == 5

    def test_leaf_node(self):
        assert cic_eval(Leaf(F_ONE_OVER_S)).allclose(F_ONE_OVER_S)
        with pytest.raises(TypeError):
            tree_to_json(Leaf(F_ONE_OVER_S))

    def test_depth_zero_is_generator(self):
        assert isinstance(cic_sample(0, 1), Generator)

    def test_deterministic(self):
        assert str(cic_sample(5, 42)) == str(cic_sample(5, 42))
        assert tree_to_json(cic_sample(5, 42)) == tree_to_json(cic_sample(5, 42))

    def test_seed_42_is_pr(self):
        assert pr_check(cic_eval(cic_sample(5, 42))).is_pr

    def test_matrix_size(self):
        F = cic_eval(cic_sample(4, 3), m=2)
        assert F.m == 2 and F.is_diagonal

    def test_bad_scale(self):
        with pytest.raises(ValueError):
            Scale(0.0, Generator("g"))

    @given(seeds, st.integers(0, 6))
    def test_depth_bound_and_pr(self, seed, depth):
        tree = cic_sample(depth, seed)
        assert tree_depth(tree) <= depth
        assert pr_check(cic_eval(tree)).is_pr


class TestPRCheck:
    def test_one_over_s(self):
        v = pr_check(F_ONE_OVER_S)
        assert v.is_pr
        assert 0j in v.skipped

    def test_affine(self):
        assert pr_check(scalar([0.3, 2.0])).is_pr

    def test_all_pass_not_pr(self):
        v = pr_check(scalar([1.0, -1.0], [1.0, 1.0]))
        assert not v.is_pr
        assert {f.reason for f in v.failures} == {FailureReason.HERMITIAN_INDEFINITE}
        assert scalar([1.0, -1.0], [1.0, 1.0])(3)[0, 0] == pytest.approx(-0.5)

    def test_rhp_pole(self):
        v = pr_check(scalar([1.0], [-1.0, 1.0]))
        assert FailureReason.RHP_POLE in {f.reason for f in v.failures}
        assert rhp_poles(scalar([1.0], [-1.0, 1.0])) == [pytest.approx(1.0)]

    def test_complex_coefficients(self):
        f = RationalMatrixFunction(((ratio([1j, 1.0]),),))
        assert FailureReason.NOT_REAL in {x.reason for x in pr_check(f).failures}

    def test_matrix_pr(self):
        # series resistor and inductor plus a gyrator coupling
        F = block([[scalar([1.0, 1.0]), scalar([1.0])],
                   [scalar([-1.0]), scalar([1.0])]])
        assert pr_check(F).is_pr
        G = block([[scalar([1.0]), scalar([3.0])],
                   [scalar([3.0]), scalar([1.0])]])
        assert not pr_check(G).is_pr

    def test_grid_parse(self):
        g = GridSpec.parse("n_omega=10,omega_max=100")
        assert g.n_omega == 10 and g.omega_max == 100.0
        assert len(g.boundary()) == 11
        with pytest.raises(ValueError):
            GridSpec.parse("bogus=1")


class TestCircuits:
    def test_fig2(self):
        a, b, d = 2.0, 3.0, 0.5
        z = ladder_impedance({"topology": "fig2",
                              "values": {"R1": d, "C": 1 / b, "R2": b / a}})
        assert z.allclose(h_family(a, b, d))

    def test_fig3_unit(self):
        z = ladder_impedance({"topology": "fig3",
                              "values": {"Ca": 1, "Lb": 1, "Lc": 1, "Cd": 1}})
        assert z.allclose(scalar([0.0, 1.0, 0.0, 1.0], [1.0, 0.0, 3.0, 0.0, 1.0]))

    @given(pos, pos, pos, pos, seeds)
    def test_fig3_matches_circuit_oracle(self, ca, lb, lc, cd, seed):
        z = ladder_impedance({"topology": "fig3",
                              "values": {"Ca": ca, "Lb": lb, "Lc": lc, "Cd": cd}})
        for s in sample_points(np.random.default_rng(seed), 4):
            v = z(s)
            if isinstance(v, PoleMarker):
                continue
            ref = fig3_impedance(s, ca, lb, lc, cd)
            assert abs(v[0, 0] - ref) <= 1e-7 * max(1.0, abs(ref))

    @given(pos, pos, pos, pos)
    def test_fig3_lossless_and_pr(self, ca, lb, lc, cd):
        z = ladder_impedance({"topology": "fig3",
                              "values": {"Ca": ca, "Lb": lb, "Lc": lc, "Cd": cd}})
        assert pr_check(z).is_pr
        w = np.array([0.1, 0.7, 3.0, 11.0])
        vals, pole = z.evaluate(1j * w)
        assert np.all(np.abs(vals[~pole].real) <= 1e-8 * np.maximum(1, np.abs(vals[~pole])))

    def test_bad_specs(self):
        with pytest.raises(ValueError):
            ladder_impedance({"topology": "fig9", "values": {}})
        with pytest.raises(ValueError):
            ladder_impedance({"topology": "fig2", "values": {"R1": 1}})
        with pytest.raises(ValueError):
            ladder_impedance({"topology": "fig2", "values": {"R1": 1, "R2": -1, "C": 1}})


def degree_one_pr(rng):
    """A random positive-real scalar of degree at most one."""
    kind = rng.integers(3)
    a, b, d = rng.uniform(0.1, 5, 3)
    if kind == 0:
        return scalar([a, b])
    if kind == 1:
        return h_family(a, b, d)
    return scalar([d])


class TestFeedback:
    def test_all_ones(self):
        H = feedback_network(G_ONE, G_ONE, G_ONE, G_ONE)
        npt.assert_allclose(H(0.3), [[0.4, -0.2], [0.2, 0.4]], atol=1e-14)
        npt.assert_allclose(feedback_transfer(1, 1, 1, 1), [[0.4, -0.2], [0.2, 0.4]])

    @given(seeds)
    def test_matches_loop_equations(self, seed):
        rng = np.random.default_rng(seed)
        fs = [degree_one_pr(rng) for _ in range(4)]
        H = feedback_network(*fs)
        for s in rng.uniform(0.1, 3, 3) + 1j * rng.uniform(-3, 3, 3):
            vals = [f(s)[0, 0] for f in fs]
            npt.assert_allclose(H(s), feedback_transfer(*vals), rtol=1e-9, atol=1e-12)

    @given(seeds)
    def test_upper_left_is_nested_phi(self, seed):
        rng = np.random.default_rng(seed)
        fa, fb, fc, fd = (degree_one_pr(rng) for _ in range(4))
        H = feedback_network(fa, fb, fc, fd)
        ref = phi(phi(fc, fd), phi(fa, fb))
        assert sub_block(H, 0, 0, 1).allclose(ref)

    @given(seeds)
    def test_pr_blocks_give_pr_network(self, seed):
        rng = np.random.default_rng(seed)
        assert pr_check(feedback_network(*(degree_one_pr(rng) for _ in range(4)))).is_pr


class TestMaximalityCounterexample:
    def test_constant_degenerate(self):
        with pytest.raises(ValueError, match="degenerate"):
            maximality_counterexample(constant(-1.0), 1.0, 1.0, 0.0)

    def test_scalar_pole_at_s0(self):
        G = scalar([1.0, -2.0], [1.0, 1.0])  # G(2) = -1
        out = maximality_counterexample(G, 2.0, 1.0, 0.0)
        assert isinstance(out(2.0), PoleMarker)
        assert rhp_poles(out) == [pytest.approx(2.0)]

    def test_matrix_case(self):
        G = diag([scalar([0.0, -1.0], [1.0, 1.0]), constant(1.0)])  # -s/(s+1) = -1/2 at s=1
        out = maximality_counterexample(G, 1.0, 0.5, 0.0)
        assert any(abs(p - 1.0) < 1e-8 for p in rhp_poles(out))

    def test_complex_eigenvalue(self):
        # G = [[-a, b], [-b, -a]] constant has eigenvalue -a + ib
        a, b = 1.0, 2.0
        G = block([[constant(-a), constant(b)], [constant(-b), constant(-a)]])
        with pytest.raises(ValueError, match="degenerate"):
            maximality_counterexample(G, 1.0, a, b)

    def test_wrong_eigenvalue(self):
        with pytest.raises(ValueError):
            maximality_counterexample(scalar([1.0, -2.0], [1.0, 1.0]), 2.0, 3.0, 0.0)
