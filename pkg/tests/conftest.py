import numpy as np
import pytest

from vwsim import ImageObject, Vocabulary
from vwsim.core import unit_rows


def random_vocab(rng, size, dim):
    return Vocabulary(vectors=unit_rows(rng.standard_normal((size, dim))),
                      frequencies=rng.randint(0, 100, size=size))


def random_vocab_image(rng, vocab, words, name="img"):
    weights = rng.uniform(0.05, 1.0, size=words)
    return ImageObject(image_id=name, weights=weights / weights.max(),
                       word_ids=rng.randint(0, vocab.size, size=words), vocab=vocab)


def random_raw_image(rng, words, dim, name="img"):
    weights = rng.uniform(0.05, 1.0, size=words)
    return ImageObject(image_id=name, weights=weights / weights.max(),
                       vectors=rng.standard_normal((words, dim)))


@pytest.fixture
def tiny_vocab():
    # Three words on the unit circle: pairwise cosines 0.8, 0.6, 0.0.
    return Vocabulary(vectors=np.array([[1.0, 0.0], [0.8, 0.6], [0.0, 1.0]]),
                      frequencies=np.array([5, 3, 1]))
