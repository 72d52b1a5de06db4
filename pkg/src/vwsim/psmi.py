"""Offline index of potential similar words over a whole vocabulary.

For every vocabulary word, precompute the list of all other words whose
clamped cosine exceeds a build threshold, stored in descending-similarity
order (self first, at exactly 1.0). Physically the per-word lists hang off
the leaves of a Huffman tree built over the word frequencies; queries go
through a constant-time id-to-leaf map, the tree layout is kept for
code-length statistics.

Matching against this index never touches vectors at query time: walking a
query word's list in descending order, the first entry present in the
target image is the maximum, so the outcome is bit-identical to the naive
matcher whenever the query threshold is at least the build threshold.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import (
    ImageObject,
    MatchOutcome,
    Vocabulary,
    check_threshold,
    image_similarity,
)
from .errors import DomainError, PreconditionError, UnknownWordError
from .matching import _pair_score

__all__ = [
    "PsimEntry",
    "PsimList",
    "HuffmanNode",
    "PsimIndex",
    "build_huffman_tree",
    "huffman_depths",
    "weighted_code_length",
    "build_psmi_index",
    "huffman_search",
    "psmi_match",
    "psmi_similarity",
]

# Candidate margin for the vectorized all-pairs pass; candidates are then
# rescored through the exact scalar kernel before thresholding.
_CANDIDATE_MARGIN = 1e-9


@dataclass(frozen=True)
class PsimEntry:
    """One potential similar word: vocabulary id plus its similarity."""

    word_id: int
    sim: float


@dataclass(frozen=True)
class PsimList:
    """A word's potential similar words, self first, then descending sim."""

    entries: tuple[PsimEntry, ...]

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)


@dataclass(eq=False)
class HuffmanNode:
    """Leaf (word id, frequency, payload) or internal merge node."""

    frequency: int
    word_id: Optional[int] = None
    payload: Optional[PsimList] = None
    left: Optional["HuffmanNode"] = None
    right: Optional["HuffmanNode"] = None

    @property
    def is_leaf(self) -> bool:
        return self.word_id is not None


def build_huffman_tree(frequencies, payloads=None) -> HuffmanNode:
    """Classic two-smallest-merge construction with fixed tie-breaking.

    Ties on frequency are resolved by preferring leaves (smallest word id
    first) over internal nodes, and internal nodes by creation order. Of the
    two merged nodes, the smaller one becomes the right child. Any fixed
    rule would do; this one makes the tree a pure function of the
    frequencies, which serialization relies on.
    """
    freqs = [int(f) for f in frequencies]
    if not freqs:
        raise DomainError("cannot build a tree over an empty vocabulary")
    if any(f < 0 for f in freqs):
        raise DomainError("frequencies must be non-negative")

    heap = []
    for wid, f in enumerate(freqs):
        payload = None if payloads is None else payloads[wid]
        node = HuffmanNode(frequency=f, word_id=wid, payload=payload)
        heapq.heappush(heap, (f, 0, wid, node))
    serial = 0
    while len(heap) > 1:
        _, _, _, smaller = heapq.heappop(heap)
        _, _, _, larger = heapq.heappop(heap)
        merged = HuffmanNode(frequency=smaller.frequency + larger.frequency,
                             left=larger, right=smaller)
        heapq.heappush(heap, (merged.frequency, 1, serial, merged))
        serial += 1
    return heap[0][3]


def huffman_depths(root: HuffmanNode, size: int) -> np.ndarray:
    """Leaf depth per word id (the code length of that word)."""
    depths = np.zeros(size, dtype=np.int64)
    stack = [(root, 0)]
    while stack:
        node, depth = stack.pop()
        if node.is_leaf:
            depths[node.word_id] = depth
        else:
            stack.append((node.left, depth + 1))
            stack.append((node.right, depth + 1))
    return depths


def weighted_code_length(index: "PsimIndex") -> int:
    """Total frequency-weighted code length of the tree layout."""
    depths = huffman_depths(index.tree, index.size)
    return int(np.dot(index.frequencies, depths))


@dataclass(frozen=True, eq=False)
class PsimIndex:
    """The built offline index.

    ``csr_offsets/csr_ids/csr_sims`` hold all per-word lists back to back
    (word ``w`` owns the slice ``offsets[w]:offsets[w+1]``); ``lists`` and
    the Huffman ``tree``/``lookup`` expose the same data as objects. The
    build threshold is stored because entries below it were discarded and
    queries under it cannot be answered.
    """

    mu0_build: float
    vocab_checksum: int
    dimension: int
    frequencies: np.ndarray
    csr_offsets: np.ndarray
    csr_ids: np.ndarray
    csr_sims: np.ndarray
    lists: tuple[PsimList, ...]
    tree: HuffmanNode
    lookup: dict[int, HuffmanNode] = field(repr=False)

    @property
    def size(self) -> int:
        return self.frequencies.size

    @classmethod
    def from_lists(cls, frequencies: np.ndarray, offsets: np.ndarray, ids: np.ndarray,
                   sims: np.ndarray, mu0_build: float, vocab_checksum: int,
                   dimension: int) -> "PsimIndex":
        """Single construction path shared by the builder and the loader."""
        frequencies = np.ascontiguousarray(frequencies, dtype=np.int64)
        offsets = np.ascontiguousarray(offsets, dtype=np.int64)
        ids = np.ascontiguousarray(ids, dtype=np.int64)
        sims = np.ascontiguousarray(sims, dtype=np.float64)
        for arr in (frequencies, offsets, ids, sims):
            arr.setflags(write=False)
        lists = tuple(
            PsimList(tuple(PsimEntry(int(w), float(s))
                           for w, s in zip(ids[offsets[k]:offsets[k + 1]],
                                           sims[offsets[k]:offsets[k + 1]])))
            for k in range(frequencies.size)
        )
        tree = build_huffman_tree(frequencies, payloads=lists)
        lookup: dict[int, HuffmanNode] = {}
        stack = [tree]
        while stack:
            node = stack.pop()
            if node.is_leaf:
                lookup[node.word_id] = node
            else:
                stack.append(node.left)
                stack.append(node.right)
        return cls(mu0_build=float(mu0_build), vocab_checksum=int(vocab_checksum),
                   dimension=int(dimension), frequencies=frequencies, csr_offsets=offsets,
                   csr_ids=ids, csr_sims=sims, lists=lists, tree=tree, lookup=lookup)


def build_psmi_index(vocab: Vocabulary, mu0_build: float) -> PsimIndex:
    """Precompute every word's potential similar words above ``mu0_build``.

    The all-pairs pass runs as chunked matrix products; shortlisted pairs
    are rescored through the shared scalar kernel so stored similarities
    match what the naive matcher would compute on the same two words.
    """
    mu0_build = check_threshold(mu0_build)
    unit = vocab.unit_matrix
    raw = vocab.vectors
    k = vocab.size
    per_word: list[list[tuple[float, int]]] = [[] for _ in range(k)]

    chunk = max(1, (1 << 22) // k)
    cut = mu0_build - _CANDIDATE_MARGIN
    for lo in range(0, k, chunk):
        hi = min(k, lo + chunk)
        scores = unit[lo:hi] @ unit.T
        rows, cols = np.nonzero(scores > cut)
        for r, j in zip(rows.tolist(), cols.tolist()):
            i = lo + r
            if i == j:
                continue
            s = _pair_score(unit[i], unit[j], raw[i], raw[j])
            if s > mu0_build:
                per_word[i].append((-s, j))

    offsets = np.zeros(k + 1, dtype=np.int64)
    all_ids: list[int] = []
    all_sims: list[float] = []
    for wid in range(k):
        entries = sorted(per_word[wid])
        all_ids.append(wid)
        all_sims.append(1.0)
        for neg_s, j in entries:
            all_ids.append(j)
            all_sims.append(-neg_s)
        offsets[wid + 1] = len(all_ids)

    return PsimIndex.from_lists(
        frequencies=vocab.frequencies,
        offsets=offsets,
        ids=np.array(all_ids, dtype=np.int64),
        sims=np.array(all_sims, dtype=np.float64),
        mu0_build=mu0_build,
        vocab_checksum=vocab.checksum,
        dimension=vocab.dimension,
    )


def huffman_search(idx: PsimIndex, word_id: int) -> PsimList:
    """Fetch a word's list through the constant-time id-to-leaf map."""
    leaf = idx.lookup.get(int(word_id))
    if leaf is None:
        raise UnknownWordError(f"word id {int(word_id)} is not in the indexed vocabulary")
    return leaf.payload


def _multirange(starts: np.ndarray, lengths: np.ndarray) -> np.ndarray:
    """Concatenation of ``arange(s, s + L)`` for each (start, length) pair."""
    total = int(lengths.sum())
    out = np.ones(total, dtype=np.int64)
    out[0] = starts[0]
    boundaries = np.cumsum(lengths)[:-1]
    out[boundaries] = starts[1:] - starts[:-1] - lengths[:-1] + 1
    return np.cumsum(out)


def psmi_match(a: ImageObject, b: ImageObject, mu0_query: float, idx: PsimIndex) -> MatchOutcome:
    """Match using only precomputed lists and id membership on B.

    For each query word, the first list entry above ``mu0_query`` whose word
    id occurs in B wins; its partner is the smallest B position holding that
    id. Requires id-carrying images and ``mu0_query >= mu0_build``.
    """
    mu0_query = check_threshold(mu0_query)
    if a.word_count == 0 or b.word_count == 0:
        raise DomainError("cannot match an empty image")
    if a.word_ids is None or b.word_ids is None:
        raise PreconditionError("offline-index matching requires vocabulary word ids on both images")
    if mu0_query < idx.mu0_build:
        raise PreconditionError(
            f"query threshold {mu0_query} is below the index build threshold {idx.mu0_build}")
    k = idx.size
    a_ids = a.word_ids
    b_ids = b.word_ids
    if int(a_ids.max()) >= k or int(b_ids.max()) >= k:
        raise PreconditionError("image carries word ids outside the indexed vocabulary")

    n = b.word_count
    # Smallest B position per word id; n doubles as the "absent" sentinel.
    first_pos = np.full(k, n, dtype=np.int64)
    np.minimum.at(first_pos, b_ids, np.arange(n, dtype=np.int64))

    starts = idx.csr_offsets[a_ids]
    lengths = idx.csr_offsets[a_ids + 1] - starts
    flat = _multirange(starts, lengths)
    cand_ids = idx.csr_ids[flat]
    cand_sims = idx.csr_sims[flat]
    viable = (cand_sims > mu0_query) & (first_pos[cand_ids] < n)

    total = flat.size
    rank = flat - np.repeat(starts, lengths)
    seg_offsets = np.concatenate(([0], np.cumsum(lengths)[:-1]))
    first_rank = np.minimum.reduceat(np.where(viable, rank, total), seg_offsets)
    hit = first_rank < total

    mu = np.zeros(a.word_count, dtype=np.float64)
    partners = np.full(a.word_count, -1, dtype=np.int64)
    chosen = (seg_offsets + first_rank)[hit]
    mu[hit] = cand_sims[chosen]
    partners[hit] = first_pos[cand_ids[chosen]]
    return MatchOutcome.from_arrays(mu, partners)


def psmi_similarity(a: ImageObject, b: ImageObject, mu0: float, idx: PsimIndex) -> float:
    return image_similarity(a, b, psmi_match(a, b, mu0, idx))
