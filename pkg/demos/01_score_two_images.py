"""Score two images represented as weighted bags of visual words.

Shows the basic pipeline on hand-built images: matching pairs up words by
clamped cosine above a threshold, scoring normalizes pair mass against
total and unmatched weight. The measure is directional, so the two
orderings of the same pair give different scores.
"""

import numpy as np

from vwsim import ImageObject, VisualWord, smin_match, smin_similarity

sunset = ImageObject.from_words("sunset", [
    VisualWord(None, [1.0, 0.0, 0.0], weight=1.0),
    VisualWord(None, [0.8, 0.6, 0.0], weight=0.7),
    VisualWord(None, [0.0, 0.0, 1.0], weight=0.4),
])
sunset_crop = ImageObject.from_words("sunset_crop", [
    VisualWord(None, [1.0, 0.0, 0.0], weight=1.0),
    VisualWord(None, [0.6, 0.8, 0.0], weight=0.8),
])
unrelated = ImageObject.from_words("unrelated", [
    VisualWord(None, [0.0, 1.0, 0.0], weight=1.0),
])

print("matching sunset against sunset_crop (threshold 0.7):")
outcome = smin_match(sunset, sunset_crop, 0.7)
for a_idx, b_idx, sim in outcome.pairs:
    print(f"  word {a_idx} -> word {b_idx}  cosine {sim:.4f}")
print(f"  unmatched query words: {[i for i, v in enumerate(outcome.mu) if v == 0.0]}")

print()
print(f"Sim(sunset, sunset_crop) = {smin_similarity(sunset, sunset_crop, 0.7):.6f}")
print(f"Sim(sunset, unrelated)   = {smin_similarity(sunset, unrelated, 0.7):.6f}")

# The measure is directional: each query word picks its own best partner,
# so a single target word can serve several query words, but not vice versa.
thumbnail = ImageObject.from_words("thumbnail", [VisualWord(None, [1.0, 0.0, 0.0], weight=1.0)])
print()
print(f"Sim(sunset, thumbnail)   = {smin_similarity(sunset, thumbnail, 0.7):.6f}")
print(f"Sim(thumbnail, sunset)   = {smin_similarity(thumbnail, sunset, 0.7):.6f}")
print("(two sunset words reuse the one thumbnail word going forward; "
      "going backward two sunset words stay unmatched)")

print()
print("threshold sweep, sunset vs sunset_crop (second pair has cosine 0.96):")
for mu0 in (0.0, 0.9, 0.97, 0.999):
    pairs = smin_match(sunset, sunset_crop, mu0).pair_count
    score = smin_similarity(sunset, sunset_crop, mu0)
    print(f"  mu0={mu0:<6} pairs={pairs}  score={score:.6f}")
