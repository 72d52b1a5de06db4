import numpy as np
import pytest

from conftest import random_raw_image, random_vocab, random_vocab_image
from oracles import brute_force_match

from vwsim import ContractError, DomainError, VisualWord, best_match, cosine, smin_match, smin_similarity


class TestCosine:
    def test_identical_vectors(self):
        assert cosine([1.0, 0.0], [1.0, 0.0]) == 1.0

    def test_orthogonal(self):
        assert cosine([1.0, 0.0], [0.0, 1.0]) == 0.0

    def test_forty_five_degrees(self):
        assert abs(cosine([1.0, 0.0], [1.0, 1.0]) - 0.7071067811865476) < 1e-12

    def test_opposite_clamps_to_zero(self):
        assert cosine([1.0, 0.0], [-1.0, 0.0]) == 0.0

    def test_scale_invariant_identity(self):
        # Parallel but non-identical vectors still score (numerically) 1.
        assert cosine([2.0, 0.0], [1.0, 0.0]) == 1.0

    def test_dimension_mismatch(self):
        with pytest.raises(ContractError):
            cosine([1.0, 0.0], [1.0, 0.0, 0.0])

    def test_zero_norm(self):
        with pytest.raises(DomainError):
            cosine([0.0, 0.0], [1.0, 0.0])

    def test_non_finite(self):
        with pytest.raises(DomainError):
            cosine([float("inf"), 0.0], [1.0, 0.0])


class TestBestMatch:
    def test_picks_global_maximum(self):
        mu, j = best_match([1.0, 0.0], [[0.8, 0.6], [1.0, 0.0]], 0.7)
        assert (mu, j) == (1.0, 1)

    def test_below_threshold_returns_unmatched(self):
        mu, j = best_match([0.0, 1.0], [[0.8, 0.6], [1.0, 0.0]], 0.7)
        assert mu == 0.0 and j is None

    def test_singleton_identity(self):
        mu, j = best_match([1.0, 0.0], [[1.0, 0.0]], 0.0)
        assert (mu, j) == (1.0, 0)

    def test_accepts_visual_words(self):
        a = VisualWord(None, [1.0, 0.0], 1.0)
        bs = [VisualWord(None, [0.0, 1.0], 1.0), VisualWord(None, [1.0, 0.1], 1.0)]
        mu, j = best_match(a, bs, 0.5)
        assert j == 1 and mu > 0.99

    def test_threshold_is_strict(self):
        # max cosine exactly 1.0 with mu0 just below passes; equality would not.
        mu, j = best_match([1.0, 0.0], [[1.0, 0.0]], 0.999999)
        assert (mu, j) == (1.0, 0)

    def test_empty_candidates(self):
        with pytest.raises(DomainError):
            best_match([1.0, 0.0], [], 0.5)

    def test_bad_threshold(self):
        with pytest.raises(DomainError):
            best_match([1.0, 0.0], [[1.0, 0.0]], 1.0)
        with pytest.raises(DomainError):
            best_match([1.0, 0.0], [[1.0, 0.0]], -0.1)


def raw_image(name, vectors, weights=None):
    vectors = np.asarray(vectors, dtype=float)
    if weights is None:
        weights = np.ones(vectors.shape[0])
    from vwsim import ImageObject
    return ImageObject(image_id=name, weights=np.asarray(weights, dtype=float), vectors=vectors)


class TestSminMatch:
    def test_identity_pair(self):
        out = smin_match(raw_image("a", [[1.0, 0.0]]), raw_image("b", [[1.0, 0.0]]), 0.8)
        assert out.pairs == [(0, 0, 1.0)]
        assert out.mu.tolist() == [1.0]

    def test_one_matched_one_not(self):
        out = smin_match(raw_image("a", [[1.0, 0.0], [0.0, 1.0]]),
                         raw_image("b", [[0.8, 0.6], [1.0, 0.0]]), 0.7)
        assert out.pairs == [(0, 1, 1.0)]
        assert out.mu[0] == 1.0 and out.mu[1] == 0.0

    def test_target_word_reused(self):
        out = smin_match(raw_image("a", [[1.0, 0.0], [0.8, 0.6]]),
                         raw_image("b", [[1.0, 0.0]]), 0.7)
        assert [(i, j) for i, j, _ in out.pairs] == [(0, 0), (1, 0)]
        assert out.matched_b_ids == frozenset({0})
        assert out.pairs[0][2] == 1.0
        assert abs(out.pairs[1][2] - 0.8) < 1e-12

    def test_matches_brute_force_oracle(self):
        rng = np.random.RandomState(41)
        for trial in range(150):
            d = int(rng.choice([2, 8, 32]))
            a = random_raw_image(rng, rng.randint(1, 9), d, "a")
            b = random_raw_image(rng, rng.randint(1, 9), d, "b")
            mu0 = float(rng.choice([0.0, 0.3, 0.7, 0.9]))
            out = smin_match(a, b, mu0)
            mu_ref, partners_ref = brute_force_match(a, b, mu0)
            assert out.mu.tolist() == mu_ref
            partners = np.full(a.word_count, -1, dtype=int)
            partners[out.a_indices] = out.b_indices
            assert partners.tolist() == partners_ref

    def test_matches_oracle_on_vocab_images(self):
        rng = np.random.RandomState(43)
        vocab = random_vocab(rng, 64, 8)
        for trial in range(80):
            a = random_vocab_image(rng, vocab, rng.randint(1, 10), "a")
            b = random_vocab_image(rng, vocab, rng.randint(1, 10), "b")
            out = smin_match(a, b, 0.6)
            mu_ref, partners_ref = brute_force_match(a, b, 0.6)
            assert out.mu.tolist() == mu_ref

    def test_mu_positive_iff_paired_once(self):
        rng = np.random.RandomState(47)
        for _ in range(100):
            a = random_raw_image(rng, rng.randint(1, 10), 4, "a")
            b = random_raw_image(rng, rng.randint(1, 10), 4, "b")
            out = smin_match(a, b, 0.5)
            paired = list(out.a_indices)
            assert len(paired) == len(set(paired)) == out.pair_count
            assert sorted(np.flatnonzero(out.mu > 0.0)) == sorted(paired)

    def test_pair_count_never_grows_with_threshold(self):
        rng = np.random.RandomState(53)
        for _ in range(100):
            a = random_raw_image(rng, rng.randint(1, 8), 3, "a")
            b = random_raw_image(rng, rng.randint(1, 8), 3, "b")
            counts = [smin_match(a, b, mu0).pair_count
                      for mu0 in (0.0, 0.2, 0.4, 0.6, 0.8, 0.95)]
            assert counts == sorted(counts, reverse=True)

    def test_deterministic(self):
        rng = np.random.RandomState(59)
        a = random_raw_image(rng, 7, 5, "a")
        b = random_raw_image(rng, 9, 5, "b")
        assert smin_match(a, b, 0.4) == smin_match(a, b, 0.4)

    def test_duplicate_target_words_take_smallest_index(self):
        b = raw_image("b", [[0.6, 0.8], [1.0, 0.0], [1.0, 0.0]])
        out = smin_match(raw_image("a", [[1.0, 0.0]]), b, 0.5)
        assert out.pairs == [(0, 1, 1.0)]

    def test_dimension_mismatch(self):
        with pytest.raises(ContractError):
            smin_match(raw_image("a", [[1.0, 0.0]]), raw_image("b", [[1.0, 0.0, 0.0]]), 0.5)


def test_smin_similarity_composes():
    a = raw_image("a", [[1.0, 0.0]])
    assert smin_similarity(a, a, 0.5) == 1.0
    b = raw_image("b", [[0.0, 1.0]])
    assert smin_similarity(a, b, 0.5) == 0.0


class TestSharedNormalizationPath:
    """The exact cross-matcher agreement rests on one property: normalizing
    a row alone produces the same bits as normalizing it inside any batch.
    If this ever breaks (say, a numpy reduction change), the equivalence
    suites will fail loudly; this test points at the root cause."""

    def test_row_normalization_is_batch_independent(self):
        from vwsim.core import unit_rows, unit_vector

        rng = np.random.RandomState(211)
        for d in (2, 3, 17, 256):
            mat = rng.standard_normal((40, d))
            whole = unit_rows(mat)
            for i in range(0, 40, 7):
                assert np.array_equal(unit_vector(mat[i]), whole[i])
                assert np.array_equal(unit_rows(mat[i:i + 3])[0], whole[i])

    def test_vocabulary_unit_matrix_matches_single_vector_path(self):
        from vwsim.core import unit_vector
        from conftest import random_vocab

        vocab = random_vocab(np.random.RandomState(223), 32, 9)
        for wid in (0, 13, 31):
            assert np.array_equal(vocab.unit_matrix[wid], unit_vector(vocab.vectors[wid]))

    def test_cosine_equals_kernel_on_batch_rows(self):
        from vwsim.core import unit_rows
        from vwsim.matching import _pair_score

        rng = np.random.RandomState(227)
        mat = rng.standard_normal((10, 6))
        units = unit_rows(mat)
        for i in range(10):
            for j in range(10):
                assert cosine(mat[i], mat[j]) == _pair_score(units[i], units[j], mat[i], mat[j])
