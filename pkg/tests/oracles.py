"""Independent reference implementations the suite checks against.

Each oracle is written in the plainest possible style with its own control
flow, so the production code cannot share a structural bug with it. The
matching oracles reuse the package's scalar ``cosine`` primitive and
nothing else: exact float agreement is part of the contract under test, and
that requires one shared arithmetic kernel; everything around it (loops,
argmax, tie-breaking, thresholding, bookkeeping) is reimplemented here.
"""

import math

from vwsim.matching import cosine


def brute_force_match(a, b, mu0):
    """Double-loop matching; returns (mu list, partner list, -1 = unmatched)."""
    mat_a = a.vector_matrix()
    mat_b = b.vector_matrix()
    mu = []
    partners = []
    for i in range(a.word_count):
        best = -1.0
        best_j = -1
        for j in range(b.word_count):
            s = cosine(mat_a[i], mat_b[j])
            if s > best:
                best = s
                best_j = j
        if best > mu0:
            mu.append(best)
            partners.append(best_j)
        else:
            mu.append(0.0)
            partners.append(-1)
    return mu, partners


def brute_force_top1(b_matrix, q):
    """Linear argmax of clamped cosine, smallest index on ties."""
    best = -1.0
    best_j = 0
    for j in range(b_matrix.shape[0]):
        s = cosine(b_matrix[j], q)
        if s > best:
            best = s
            best_j = j
    return best_j, best


def similarity_reference(a_weights, b_weights, pairs):
    """Direct arithmetic evaluation of the pair-based score.

    ``pairs`` is a list of (a_index, b_index, lam). Uses ``math.fsum`` and
    explicit set bookkeeping, independent of the vectorized production path.
    """
    a_weights = [float(w) for w in a_weights]
    b_weights = [float(w) for w in b_weights]
    if not pairs:
        return 0.0
    num = math.fsum(lam * a_weights[i] * b_weights[j] for i, j, lam in pairs)
    matched_a = {i for i, _, _ in pairs}
    matched_b = {j for _, j, _ in pairs}
    unmatched_a = math.fsum(w for i, w in enumerate(a_weights) if i not in matched_a)
    unmatched_b = math.fsum(w for j, w in enumerate(b_weights) if j not in matched_b)
    mass = math.sqrt(math.fsum(a_weights) * math.fsum(b_weights))
    penalty = math.sqrt(
        math.fsum(lam * lam * a_weights[i] * b_weights[j] for i, j, lam in pairs)
        + unmatched_a * unmatched_b)
    return num / (mass * penalty)


def huffman_cost_reference(frequencies):
    """Optimal total weighted code length by the merge-sum identity.

    The sum of frequency * depth over the leaves equals the sum of the
    merged weights over all merge steps, independent of tie-breaking. This
    uses repeated sorting instead of a heap and never builds a tree.
    """
    nodes = [int(f) for f in frequencies]
    total = 0
    while len(nodes) > 1:
        nodes.sort()
        a = nodes.pop(0)
        b = nodes.pop(0)
        total += a + b
        nodes.append(a + b)
    return total
