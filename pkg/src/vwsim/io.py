"""File formats and ingestion.

Text formats are JSON-lines: one vocabulary entry or one image per line,
named fields, floats written as shortest round-trip decimals. The offline
index uses a fixed little-endian binary layout. All save/load pairs are
exact inverses; loaders validate and raise :class:`ValidationError` (or the
:class:`FormatError` / :class:`CompatibilityError` subclasses) rather than
ever returning wrong data.

Feature extraction from real images is out of scope: raw-feature files
(images whose words carry inline vectors) are the ingestion boundary.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .core import ImageObject, Vocabulary
from .errors import CompatibilityError, FormatError, ValidationError
from .psmi import PsimIndex

__all__ = [
    "Dataset",
    "load_vocabulary",
    "save_vocabulary",
    "load_images",
    "save_images",
    "load_truth",
    "save_truth",
    "load_psmi",
    "save_psmi",
]

PSMI_MAGIC = b"PSMI"
PSMI_VERSION = 1


@dataclass(frozen=True)
class Dataset:
    """A collection of images, optionally tied to one vocabulary."""

    images: tuple[ImageObject, ...]
    vocab: Optional[Vocabulary] = None

    def __post_init__(self):
        object.__setattr__(self, "images", tuple(self.images))
        seen = set()
        for img in self.images:
            if img.image_id in seen:
                raise ValidationError(f"duplicate image id {img.image_id!r}")
            seen.add(img.image_id)
            if self.vocab is not None and img.word_ids is not None and img.word_count:
                if int(img.word_ids.max()) >= self.vocab.size:
                    raise ValidationError(
                        f"image {img.image_id!r} references a word id outside the vocabulary")

    def __len__(self) -> int:
        return len(self.images)


def _float(x) -> float:
    return float(x)


def save_vocabulary(vocab: Vocabulary, path) -> None:
    lines = []
    for wid, freq, vec in vocab.entries():
        lines.append(json.dumps(
            {"word_id": wid, "frequency": freq, "vector": [_float(c) for c in vec]}))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_vocabulary(path) -> Vocabulary:
    text = Path(path).read_text(encoding="utf-8")
    entries: dict[int, tuple[int, list[float]]] = {}
    dim = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
            wid = int(rec["word_id"])
            freq = int(rec["frequency"])
            vec = [float(c) for c in rec["vector"]]
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"{path}: line {lineno}: malformed vocabulary entry ({exc})") from exc
        if wid in entries:
            raise ValidationError(f"{path}: line {lineno}: duplicate word id {wid}")
        if freq < 0:
            raise ValidationError(f"{path}: line {lineno}: negative frequency")
        if dim is None:
            dim = len(vec)
        elif len(vec) != dim:
            raise ValidationError(f"{path}: line {lineno}: vector dimension {len(vec)} != {dim}")
        entries[wid] = (freq, vec)
    if not entries:
        raise ValidationError(f"{path}: vocabulary file has no entries")
    size = len(entries)
    if sorted(entries) != list(range(size)):
        raise ValidationError(f"{path}: word ids must be contiguous from 0 to {size - 1}")
    vectors = np.array([entries[w][1] for w in range(size)], dtype=np.float64)
    norms = np.sqrt(np.einsum("ij,ij->i", vectors, vectors))
    bad = np.flatnonzero(np.abs(norms - 1.0) > 1e-9)
    if bad.size:
        raise ValidationError(f"{path}: word {int(bad[0])} is not unit length")
    freqs = np.array([entries[w][0] for w in range(size)], dtype=np.int64)
    return Vocabulary(vectors=vectors, frequencies=freqs)


def _word_record(img: ImageObject, i: int) -> dict:
    rec: dict = {}
    if img.word_ids is not None:
        rec["word_id"] = int(img.word_ids[i])
    else:
        rec["vector"] = [_float(c) for c in img.vectors[i]]
    rec["weight"] = _float(img.weights[i])
    if img.counts is not None:
        rec["count"] = int(img.counts[i])
    return rec


def save_images(dataset: Dataset, path) -> None:
    lines = []
    for img in dataset.images:
        words = [_word_record(img, i) for i in range(img.word_count)]
        lines.append(json.dumps({"image_id": img.image_id, "words": words}))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _parse_image(rec: dict, vocab: Optional[Vocabulary], where: str) -> ImageObject:
    image_id = rec["image_id"]
    if not isinstance(image_id, str) or not image_id:
        raise ValidationError(f"{where}: image_id must be a non-empty string")
    words = rec["words"]
    if not isinstance(words, list) or not words:
        raise ValidationError(f"{where}: image {image_id!r} has no words")

    has_id = "word_id" in words[0]
    weights: list[float] = []
    counts: list[int] = []
    ids: list[int] = []
    vectors: list[list[float]] = []
    any_weight = False
    for w in words:
        if ("word_id" in w) != has_id:
            raise ValidationError(f"{where}: image {image_id!r} mixes id and inline-vector words")
        if has_id:
            ids.append(int(w["word_id"]))
        else:
            vec = [float(c) for c in w["vector"]]
            if vectors and len(vec) != len(vectors[0]):
                raise ValidationError(f"{where}: image {image_id!r} mixes vector dimensions")
            vectors.append(vec)
        if "count" in w:
            c = int(w["count"])
            if c < 1:
                raise ValidationError(f"{where}: image {image_id!r} has a count below 1")
            counts.append(c)
        else:
            counts.append(-1)
        if "weight" in w:
            any_weight = True
            weights.append(float(w["weight"]))
        else:
            weights.append(-1.0)
        if "weight" not in w and "count" not in w:
            raise ValidationError(f"{where}: image {image_id!r}: word needs a weight or a count")

    count_arr: Optional[np.ndarray] = None
    if all(c > 0 for c in counts):
        count_arr = np.array(counts, dtype=np.int64)
    elif any(c > 0 for c in counts):
        raise ValidationError(f"{where}: image {image_id!r} mixes counted and uncounted words")

    if any_weight:
        if any(w < 0 for w in weights):
            raise ValidationError(f"{where}: image {image_id!r} mixes weighted and unweighted words")
        weight_arr = np.array(weights, dtype=np.float64)
        if np.any(weight_arr <= 0.0) or np.any(weight_arr > 1.0) or not np.all(np.isfinite(weight_arr)):
            raise ValidationError(f"{where}: image {image_id!r} has weights outside (0, 1]")
    else:
        weight_arr = count_arr / count_arr.max()

    if has_id:
        if vocab is None:
            raise ValidationError(f"{where}: image {image_id!r} uses word ids but no vocabulary was given")
        id_arr = np.array(ids, dtype=np.int64)
        if np.any(id_arr < 0) or np.any(id_arr >= vocab.size):
            raise ValidationError(f"{where}: image {image_id!r} references an unknown word id")
        return ImageObject(image_id=image_id, weights=weight_arr, word_ids=id_arr,
                           vocab=vocab, counts=count_arr)
    mat = np.array(vectors, dtype=np.float64)
    if not np.all(np.isfinite(mat)):
        raise ValidationError(f"{where}: image {image_id!r} has non-finite vector components")
    if np.any(np.einsum("ij,ij->i", mat, mat) == 0.0):
        raise ValidationError(f"{where}: image {image_id!r} has a zero vector")
    return ImageObject(image_id=image_id, weights=weight_arr, vectors=mat, counts=count_arr)


def load_images(path, vocab: Optional[Vocabulary] = None) -> Dataset:
    text = Path(path).read_text(encoding="utf-8")
    images = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        where = f"{path}: line {lineno}"
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{where}: not valid JSON ({exc})") from exc
        try:
            images.append(_parse_image(rec, vocab, where))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ValidationError):
                raise
            raise ValidationError(f"{where}: malformed image record ({exc})") from exc
    if not images:
        raise ValidationError(f"{path}: image file has no records")
    return Dataset(images=tuple(images), vocab=vocab)


def save_truth(truth: dict[str, str], path) -> None:
    Path(path).write_text(json.dumps(truth, sort_keys=True, indent=0) + "\n", encoding="utf-8")


def load_truth(path) -> dict[str, str]:
    try:
        truth = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(truth, dict) or not all(
            isinstance(k, str) and isinstance(v, str) for k, v in truth.items()):
        raise ValidationError(f"{path}: ground truth must map duplicate ids to source ids")
    return truth


# Offline index binary layout, little-endian throughout:
#   "PSMI" | version u32 | K u32 | d u32 | mu0_build f64 | vocab checksum u64
#   then per word, ascending id: frequency u64 | entry count u32
#   then per entry: word_id u32 | sim f64
# Lists are stored flat; the tree is derived data and rebuilt on load.

def save_psmi(idx: PsimIndex, path) -> None:
    parts = [PSMI_MAGIC,
             struct.pack("<III", PSMI_VERSION, idx.size, idx.dimension),
             struct.pack("<dQ", idx.mu0_build, idx.vocab_checksum)]
    offs = idx.csr_offsets
    for wid in range(idx.size):
        lo, hi = int(offs[wid]), int(offs[wid + 1])
        parts.append(struct.pack("<QI", int(idx.frequencies[wid]), hi - lo))
        for j in range(lo, hi):
            parts.append(struct.pack("<Id", int(idx.csr_ids[j]), float(idx.csr_sims[j])))
    Path(path).write_bytes(b"".join(parts))


class _Reader:
    def __init__(self, data: bytes, where: str):
        self.data = data
        self.pos = 0
        self.where = where

    def take(self, fmt: str):
        size = struct.calcsize(fmt)
        if self.pos + size > len(self.data):
            raise FormatError(f"{self.where}: truncated index file")
        out = struct.unpack_from(fmt, self.data, self.pos)
        self.pos += size
        return out


def load_psmi(path, vocab: Optional[Vocabulary] = None) -> PsimIndex:
    data = Path(path).read_bytes()
    where = str(path)
    if data[:4] != PSMI_MAGIC:
        raise FormatError(f"{where}: not an index file (bad magic)")
    rd = _Reader(data, where)
    rd.pos = 4
    version, k, dim = rd.take("<III")
    if version != PSMI_VERSION:
        raise FormatError(f"{where}: unsupported index version {version}")
    if k < 1 or dim < 1:
        raise FormatError(f"{where}: empty index header")
    mu0_build, checksum = rd.take("<dQ")
    if not (0.0 <= mu0_build < 1.0):
        raise FormatError(f"{where}: stored build threshold out of range")

    freqs = np.zeros(k, dtype=np.int64)
    offsets = np.zeros(k + 1, dtype=np.int64)
    ids: list[int] = []
    sims: list[float] = []
    for wid in range(k):
        freq, n_entries = rd.take("<QI")
        freqs[wid] = freq
        if n_entries < 1:
            raise FormatError(f"{where}: word {wid} has no self entry")
        for j in range(n_entries):
            ent_id, ent_sim = rd.take("<Id")
            if ent_id >= k:
                raise FormatError(f"{where}: word {wid} references id {ent_id} >= {k}")
            if j == 0 and (ent_id != wid or ent_sim != 1.0):
                raise FormatError(f"{where}: word {wid} must lead with its self entry")
            if j > 0 and ent_sim > sims[-1]:
                raise FormatError(f"{where}: word {wid} entries are not in descending order")
            if not (mu0_build < ent_sim <= 1.0):
                raise FormatError(f"{where}: word {wid} stores a similarity outside the build range")
            ids.append(ent_id)
            sims.append(ent_sim)
        offsets[wid + 1] = len(ids)
    if rd.pos != len(data):
        raise FormatError(f"{where}: trailing bytes after index payload")

    if vocab is not None and vocab.checksum != checksum:
        raise CompatibilityError(
            f"{where}: index was built for a different vocabulary (checksum mismatch)")
    return PsimIndex.from_lists(frequencies=freqs, offsets=offsets,
                                ids=np.array(ids, dtype=np.int64),
                                sims=np.array(sims, dtype=np.float64),
                                mu0_build=mu0_build, vocab_checksum=checksum, dimension=dim)
