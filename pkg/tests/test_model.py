"""Model layer: parsing, validation, derived quantities."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_model
from fhat.model import (ModelError, assumption_pairwise_informative,
                        kl_divergence, kl_matrix, llr_table, load_model,
                        log_likelihood_ratio, make_model, serialize_model,
                        table1)

LN15 = math.log(1.5)

TABLE1_DOC = """
hypotheses: [safe, near-a, near-b]
experiments: [A, B]
observations: ["0", "1"]
prior: [0.3333333333333333, 0.3333333333333333, 0.3333333333333334]
kernel:
  A:
    safe:   [0.6, 0.4]
    near-a: [0.4, 0.6]
    near-b: [0.6, 0.4]
  B:
    safe:   [0.6, 0.4]
    near-a: [0.6, 0.4]
    near-b: [0.4, 0.6]
"""


class TestLoadModel:
    def test_table1_document_bound(self):
        """The LLR bound of the two-sensor document is ln(0.6/0.4)."""
        m = load_model(TABLE1_DOC)
        assert m.num_hypotheses == 3
        np.testing.assert_allclose(m.llr_bound, LN15, atol=1e-12)

    def test_llr_slack_is_added(self):
        m = load_model(TABLE1_DOC, llr_slack=0.5)
        np.testing.assert_allclose(m.llr_bound, LN15 + 0.5, atol=1e-12)

    def test_common_support_violation(self):
        doc = TABLE1_DOC.replace("near-a: [0.4, 0.6]\n    near-b: [0.6, 0.4]\n  B",
                                 "near-a: [0.0, 1.0]\n    near-b: [0.6, 0.4]\n  B")
        with pytest.raises(ModelError, match="common-support"):
            load_model(doc)

    def test_prior_without_full_support(self):
        doc = TABLE1_DOC.replace("prior: [0.3333333333333333, 0.3333333333333333, 0.3333333333333334]",
                                 "prior: [0.5, 0.5, 0.0]")
        with pytest.raises(ModelError, match="full support"):
            load_model(doc)

    def test_row_sum_enforced(self):
        doc = TABLE1_DOC.replace("safe:   [0.6, 0.4]", "safe:   [0.6, 0.41]", 1)
        with pytest.raises(ModelError, match="sums to"):
            load_model(doc)

    def test_parse_failure(self):
        with pytest.raises(ModelError, match="parse|key-value"):
            load_model("[:::")

    def test_missing_field(self):
        with pytest.raises(ModelError, match="missing field"):
            load_model("hypotheses: [a, b]\n")

    def test_roundtrip_is_bit_exact(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            m = random_model(rng)
            m2 = load_model(serialize_model(m))
            assert np.array_equal(m.kernel, m2.kernel)
            assert np.array_equal(m.prior, m2.prior)
            assert m.hypotheses == m2.hypotheses
            assert m.llr_bound == m2.llr_bound


class TestKlDivergence:
    def test_identity_is_zero(self):
        p = np.array([0.2, 0.5, 0.3])
        assert kl_divergence(p, p) == 0.0

    def test_bernoulli_example(self):
        # D(Bern(0.6) || Bern(0.4)) = 0.2 ln 1.5
        got = kl_divergence([0.4, 0.6], [0.6, 0.4])
        np.testing.assert_allclose(got, 0.2 * LN15, atol=1e-15)

    def test_table1_rows(self, t1):
        got = kl_divergence(t1.kernel[0, 0], t1.kernel[1, 0])
        np.testing.assert_allclose(got, 0.2 * LN15, atol=1e-15)

    def test_mismatched_support(self):
        with pytest.raises(ModelError, match="mismatched"):
            kl_divergence([1.0, 0.0], [0.5, 0.5])

    def test_nonnegative_on_random_pairs(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            p = rng.uniform(0.05, 1, 4)
            q = rng.uniform(0.05, 1, 4)
            assert kl_divergence(p / p.sum(), q / q.sum()) >= 0.0


class TestLogLikelihoodRatio:
    def test_table1_entry(self, t1):
        got = log_likelihood_ratio(t1, 0, 1, 0, 1)   # u=A, y=1
        np.testing.assert_allclose(got, math.log(0.4 / 0.6), atol=1e-15)

    def test_self_ratio_zero(self, t1):
        for u in range(2):
            for y in range(2):
                assert log_likelihood_ratio(t1, 1, 1, u, y) == 0.0

    def test_identical_rows_zero(self, t1):
        # hypotheses 0 and 2 are indistinguishable under experiment A
        for y in range(2):
            assert log_likelihood_ratio(t1, 0, 2, 0, y) == 0.0

    def test_out_of_support_errors(self):
        doc = TABLE1_DOC.replace('observations: ["0", "1"]',
                                 'observations: ["0", "1", "2"]')
        doc = doc.replace("[0.6, 0.4]", "[0.6, 0.4, 0.0]")
        doc = doc.replace("[0.4, 0.6]", "[0.4, 0.6, 0.0]")
        m = load_model(doc)
        with pytest.raises(ModelError, match="support"):
            log_likelihood_ratio(m, 0, 1, 0, 2)

    def test_antisymmetry_random_models(self):
        rng = np.random.default_rng(1)
        for _ in range(30):
            m = random_model(rng)
            for u in range(m.num_experiments):
                for y in m.support_indices(u):
                    i, j = rng.integers(m.num_hypotheses, size=2)
                    a = log_likelihood_ratio(m, i, j, u, int(y))
                    b = log_likelihood_ratio(m, j, i, u, int(y))
                    assert a == -b

    def test_mean_llr_equals_kl(self):
        """E_i[llr_j^i(u, Y)] = D(p_i^u || p_j^u), exact sums."""
        rng = np.random.default_rng(2)
        for _ in range(30):
            m = random_model(rng)
            i, j = 0, m.num_hypotheses - 1
            for u in range(m.num_experiments):
                idx = m.support_indices(u)
                mean = sum(m.kernel[i, u, y] * log_likelihood_ratio(m, i, j, u, int(y))
                           for y in idx)
                kl = kl_divergence(m.kernel[i, u, idx], m.kernel[j, u, idx])
                np.testing.assert_allclose(mean, kl, atol=1e-12)

    def test_bound_dominates_all_ratios(self):
        rng = np.random.default_rng(3)
        for _ in range(30):
            m = random_model(rng)
            worst = max(abs(log_likelihood_ratio(m, i, j, u, int(y)))
                        for u in range(m.num_experiments)
                        for y in m.support_indices(u)
                        for i in range(m.num_hypotheses)
                        for j in range(m.num_hypotheses))
            assert worst <= m.llr_bound + 1e-15


class TestBuiltins:
    def test_table1_values(self, t1):
        assert t1.experiments == ("A", "B")
        np.testing.assert_allclose(t1.kernel[1, 0, 1], 0.6)   # P(Y=1|X=1,U=A)
        np.testing.assert_allclose(t1.kernel[0, 0, 1], 0.4)
        np.testing.assert_allclose(t1.prior, np.full(3, 1 / 3))
        np.testing.assert_allclose(t1.llr_bound, LN15, atol=1e-12)

    def test_table2_values(self, t2):
        assert t2.experiments == ("A", "B", "C", "D")
        np.testing.assert_allclose(t2.kernel[2, 2, 1], 0.280)  # P(Y=1|X=2,U=C)
        np.testing.assert_allclose(t2.kernel[1, 3, 1], 0.280)
        np.testing.assert_allclose(t2.kernel[0, 2, 1], 0.402)

    def test_table1_warns_about_uninformative_experiments(self):
        with pytest.warns(RuntimeWarning, match="fails to distinguish"):
            table1()
        assert not assumption_pairwise_informative(table1())

    def test_pairwise_informative_model(self):
        m = make_model(["a", "b"], ["u"], ["0", "1"],
                       [[[0.3, 0.7]], [[0.7, 0.3]]], [0.5, 0.5])
        assert assumption_pairwise_informative(m)

    def test_kl_matrix_table2(self, t2):
        A = kl_matrix(t2, 0)
        assert A.shape == (4, 2)
        np.testing.assert_allclose(A[0, 0], 0.2 * LN15, atol=1e-12)
        np.testing.assert_allclose(A[0, 1], 0.0, atol=1e-15)
        # C against alternate 1 is the symmetric (0.402, 0.598) pair
        expect = 0.196 * math.log(0.598 / 0.402)
        np.testing.assert_allclose(A[2, 0], expect, atol=1e-12)

    def test_llr_table_matches_scalar(self, t2):
        L = llr_table(t2, 0)
        for k, j in enumerate((1, 2)):
            for u in range(4):
                for y in range(2):
                    assert L[k, u, y] == log_likelihood_ratio(t2, 0, j, u, y)


@given(st.integers(min_value=2, max_value=5), st.integers(min_value=0, max_value=2**32 - 1))
@settings(max_examples=25, deadline=None)
def test_random_models_validate(m_count, seed):
    """The generator only produces models that pass full validation."""
    rng = np.random.default_rng(seed)
    m = random_model(rng, max_hyp=m_count)
    assert m.num_hypotheses >= 2
    assert np.isfinite(m.llr_bound)
    np.testing.assert_allclose(m.kernel.sum(axis=2), 1.0, atol=1e-12)
