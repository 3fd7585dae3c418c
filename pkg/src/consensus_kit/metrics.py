"""Similarity scores and agreement rates for elicitation-study proposals.

Two complementary views of participant consensus live here:

* the classical *hard* agreement rate over equivalence groupings, where a
  pair of proposals either matches exactly or not at all, and
* a *soft* agreement rate over binary description vectors, where proposals
  may share some but not all of their descriptors.

Encoding each equivalence class as a one-hot description vector makes the
soft rate collapse to the hard rate exactly; ``one_hot_embed`` builds that
encoding so the equivalence can be exercised directly.

All functions are pure and all value types are immutable, so results can be
shared freely between threads or processes.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence, Union

import numpy as np

__all__ = [
    "DimensionMismatchError",
    "SimilarityKind",
    "DescriptionVector",
    "EquivalenceGrouping",
    "RateValue",
    "jaccard_similarity",
    "cosine_similarity",
    "agreement_rate",
    "soft_agreement_rate",
    "overall_soft_agreement",
    "one_hot_embed",
    "percent_agreeing",
]

# Row-block size for the pairwise similarity sweep.  Below this the whole
# similarity triangle fits comfortably in memory and is summed exactly.
_BLOCK = 2048


class DimensionMismatchError(ValueError):
    """Two description vectors disagree on length (malformed dataset)."""


class SimilarityKind(str, Enum):
    """Closed set of supported pairwise similarity measures.

    Jaccard is the default: it counts shared presence only, so two vectors
    that merely lack the same descriptors are not treated as agreeing.
    Hamming-style measures are deliberately not offered because they count
    shared absence as agreement.
    """

    JACCARD = "jaccard"
    COSINE = "cosine"


DEFAULT_SIMILARITY = SimilarityKind.JACCARD

VectorLike = Union["DescriptionVector", Sequence[int], np.ndarray]


@dataclass(frozen=True)
class DescriptionVector:
    """Presence/absence flags for one proposal, one flag per descriptor.

    ``bits[i]`` is 1 when descriptor ``i`` was observed in the proposal and
    0 otherwise.  The ordering of flags is owned by the descriptor taxonomy
    that produced the vector.
    """

    bits: tuple[int, ...]

    def __post_init__(self) -> None:
        bits = tuple(int(b) for b in self.bits)
        if not bits:
            raise ValueError("description vector needs at least one descriptor flag")
        if any(b not in (0, 1) for b in bits):
            raise ValueError(f"description vector flags must be 0 or 1, got {self.bits!r}")
        object.__setattr__(self, "bits", bits)

    @property
    def dims(self) -> int:
        return len(self.bits)

    def __len__(self) -> int:
        return len(self.bits)

    def __iter__(self):
        return iter(self.bits)


@dataclass(frozen=True)
class EquivalenceGrouping:
    """Partition of one referent's proposals into identical-proposal groups.

    ``group_sizes[i]`` is the number of proposals judged identical to one
    another in group ``i``; the sizes must add up to ``n_total``, the number
    of proposals collected for the referent.
    """

    group_sizes: tuple[int, ...]
    n_total: int

    def __post_init__(self) -> None:
        sizes = tuple(int(s) for s in self.group_sizes)
        if not sizes:
            raise ValueError("a grouping needs at least one group")
        if any(s < 1 for s in sizes):
            raise ValueError(f"every group must hold at least one proposal, got {sizes}")
        if sum(sizes) != self.n_total:
            raise ValueError(
                f"group sizes {sizes} sum to {sum(sizes)}, expected n_total={self.n_total}"
            )
        object.__setattr__(self, "group_sizes", sizes)
        object.__setattr__(self, "n_total", int(self.n_total))

    @property
    def group_count(self) -> int:
        return len(self.group_sizes)

    @classmethod
    def from_partition(cls, partition: Iterable[Sequence]) -> "EquivalenceGrouping":
        """Build a grouping from explicit groups of proposals (sizes only)."""
        sizes = tuple(len(group) for group in partition)
        return cls(group_sizes=sizes, n_total=sum(sizes))


@dataclass(frozen=True)
class RateValue:
    """An agreement rate in [0, 1], tagged with the metric that produced it."""

    value: float
    kind: str  # "AR" (hard, grouping-based) or "SAR" (soft, vector-based)

    def __post_init__(self) -> None:
        if self.kind not in ("AR", "SAR"):
            raise ValueError(f"rate kind must be 'AR' or 'SAR', got {self.kind!r}")
        value = float(self.value)
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"agreement rates live in [0, 1], got {value!r}")
        object.__setattr__(self, "value", value)

    def __float__(self) -> float:
        return self.value


def _as_bit_array(vector: VectorLike) -> np.ndarray:
    """Coerce a description vector or raw 0/1 sequence to a uint8 array."""
    if isinstance(vector, DescriptionVector):
        return np.array(vector.bits, dtype=np.uint8)
    arr = np.asarray(vector)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("a description vector must be a non-empty 1-d sequence")
    if not np.isin(arr, (0, 1)).all():
        raise ValueError("description vector flags must be 0 or 1")
    return arr.astype(np.uint8)


def jaccard_similarity(a: VectorLike, b: VectorLike) -> float:
    """Jaccard similarity of two binary description vectors.

    Counts shared presence only: the score is the number of descriptors both
    vectors mark present divided by the number either marks present.  On
    binary inputs this set form coincides with the algebraic form
    ``a.b / (|a|^2 + |b|^2 - a.b)`` because the denominator reduces to the
    same union count, so both readings are satisfied by one computation.

    Two all-zero vectors have an empty union; by the conditional definition
    used throughout this package the similarity is then 0, not undefined,
    since a shared lack of descriptors is no evidence of agreement.

    Raises
    ------
    DimensionMismatchError
        If the vectors have different lengths.
    """
    va, vb = _as_bit_array(a), _as_bit_array(b)
    if va.size != vb.size:
        raise DimensionMismatchError(
            f"description vectors differ in length: {va.size} vs {vb.size}"
        )
    intersection = int(np.count_nonzero(va & vb))
    union = int(np.count_nonzero(va | vb))
    if union == 0:
        return 0.0
    return intersection / union


def cosine_similarity(a: VectorLike, b: VectorLike) -> float:
    """Cosine similarity of two binary description vectors.

    Mirrors the Jaccard conditional: if either vector is all-zero the score
    is 0 rather than undefined.  For binary inputs the dot product equals
    the shared-presence count and each squared norm equals the vector's
    presence count.

    Raises
    ------
    DimensionMismatchError
        If the vectors have different lengths.
    """
    va, vb = _as_bit_array(a), _as_bit_array(b)
    if va.size != vb.size:
        raise DimensionMismatchError(
            f"description vectors differ in length: {va.size} vs {vb.size}"
        )
    ones_a = int(np.count_nonzero(va))
    ones_b = int(np.count_nonzero(vb))
    if ones_a == 0 or ones_b == 0:
        return 0.0
    intersection = int(np.count_nonzero(va & vb))
    return intersection / math.sqrt(ones_a * ones_b)


def agreement_rate(grouping: EquivalenceGrouping) -> RateValue:
    """Hard agreement rate of an equivalence grouping.

    The fraction of ordered proposal pairs that fall inside the same
    equivalence group: ``sum(s * (s - 1)) / (N * (N - 1))`` over group sizes
    ``s``.  It is 0 exactly when every group is a singleton and 1 exactly
    when a single group holds every proposal.

    Raises
    ------
    ValueError
        If the grouping covers fewer than two proposals; pairwise agreement
        is undefined there and silently inventing a value would mask bad
        study data.
    """
    if grouping.n_total < 2:
        raise ValueError("agreement rate needs at least two proposals per referent")
    n = grouping.n_total
    agreeing_pairs = sum(s * (s - 1) for s in grouping.group_sizes)
    return RateValue(value=agreeing_pairs / (n * (n - 1)), kind="AR")


def _similarity_matrix_mean(matrix: np.ndarray, kind: SimilarityKind) -> float:
    """Mean pairwise similarity over the strict upper triangle of a 0/1 matrix.

    Pair scores are each an exact small-integer division, and the triangle
    is summed with ``math.fsum`` (exact) when it fits in one block, falling
    back to per-block partial sums for very large inputs.  Either way the
    result is stable under any permutation of the input rows to well below
    1e-12.
    """
    n = matrix.shape[0]
    a = matrix.astype(np.float64)
    ones = a.sum(axis=1)  # squared norm == presence count for binary rows
    cols = np.arange(n)[None, :]
    partials: list[float] = []
    for i0 in range(0, n, _BLOCK):
        i1 = min(i0 + _BLOCK, n)
        g = a[i0:i1] @ a.T  # pairwise shared-presence counts, exact
        if kind is SimilarityKind.JACCARD:
            denom = ones[i0:i1, None] + ones[None, :] - g
        else:
            denom = np.sqrt(ones[i0:i1, None] * ones[None, :])
        sims = np.divide(g, denom, out=np.zeros_like(g), where=denom > 0)
        keep = cols > np.arange(i0, i1)[:, None]
        vals = sims[keep]
        if n <= _BLOCK:
            return 2.0 * math.fsum(vals.tolist()) / (n * (n - 1))
        partials.append(float(vals.sum()))
    return 2.0 * math.fsum(partials) / (n * (n - 1))


def soft_agreement_rate(
    vectors: Iterable[VectorLike],
    sim: SimilarityKind = DEFAULT_SIMILARITY,
) -> RateValue:
    """Soft agreement rate: mean pairwise similarity of description vectors.

    Averages the chosen similarity over all unordered pairs of the given
    vectors, i.e. ``2 / (N * (N - 1)) * sum_{j<k} sim(v_j, v_k)``.  The
    result does not depend on the order of the input.

    Parameters
    ----------
    vectors:
        At least two description vectors of identical length.
    sim:
        Pairwise similarity to average; Jaccard by default.

    Raises
    ------
    ValueError
        If fewer than two vectors are given.
    DimensionMismatchError
        If the vectors do not all share one length.
    """
    sim = SimilarityKind(sim)
    rows = [_as_bit_array(v) for v in vectors]
    if len(rows) < 2:
        raise ValueError("soft agreement rate needs at least two description vectors")
    dims = rows[0].size
    for i, row in enumerate(rows):
        if row.size != dims:
            raise DimensionMismatchError(
                f"vector {i} has {row.size} flags, expected {dims}"
            )
    matrix = np.stack(rows)
    return RateValue(value=_similarity_matrix_mean(matrix, sim), kind="SAR")


def overall_soft_agreement(per_referent: Sequence[Union[RateValue, float]]) -> float:
    """Unweighted mean of per-referent soft agreement rates.

    Raises
    ------
    ValueError
        If the list is empty.
    """
    values = [float(rate) for rate in per_referent]
    if not values:
        raise ValueError("overall agreement needs at least one per-referent rate")
    return math.fsum(values) / len(values)


def one_hot_embed(
    grouping: EquivalenceGrouping,
    assignment: Sequence[int],
) -> list[DescriptionVector]:
    """Encode an equivalence grouping as one-hot description vectors.

    ``assignment[j]`` names the group of proposal ``j``; the returned vector
    for proposal ``j`` has a single 1 at that group's index and length equal
    to the number of groups.  Under Jaccard similarity two such vectors
    score 1 when the proposals share a group and 0 otherwise, which is what
    collapses the soft agreement rate onto the hard one.

    Raises
    ------
    ValueError
        If the assignment does not place exactly ``group_sizes[i]`` proposals
        in each group ``i``.
    """
    assignment = tuple(int(g) for g in assignment)
    if len(assignment) != grouping.n_total:
        raise ValueError(
            f"assignment covers {len(assignment)} proposals, "
            f"grouping expects {grouping.n_total}"
        )
    group_count = grouping.group_count
    counts = Counter(assignment)
    if any(g < 0 or g >= group_count for g in counts):
        raise ValueError(f"assignment uses group indices outside 0..{group_count - 1}")
    for index, size in enumerate(grouping.group_sizes):
        if counts.get(index, 0) != size:
            raise ValueError(
                f"group {index} should hold {size} proposals, "
                f"assignment places {counts.get(index, 0)}"
            )
    vectors = []
    for group_index in assignment:
        bits = [0] * group_count
        bits[group_index] = 1
        vectors.append(DescriptionVector(tuple(bits)))
    return vectors


def percent_agreeing(rate: Union[RateValue, float]) -> float:
    """Estimated average percentage of participants agreeing, from a rate.

    Agreement rates are built from pairwise matches, so the share of
    participants in an agreeing cluster scales roughly with the square root
    of the rate; this returns ``100 * sqrt(rate)``.  Always feed it the
    full-precision rate; deriving it from a rounded display value skews
    the estimate.
    """
    value = float(rate)
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"agreement rates live in [0, 1], got {value!r}")
    return 100.0 * math.sqrt(value)
