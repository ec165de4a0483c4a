"""Exact integer lag algebra for second- and third-order co-arrays.

Everything here works on exact integers so that gap analysis is never
confused by floating point.  The third-order exhaustive co-array
(TO-ECA) of an array with positions ``p`` is the multiset union of the
four conjugation-pattern co-arrays

    case 1:  p[i] + p[j] + p[k]        case 2:  p[i] + p[j] - p[k]
    case 3: -p[i] - p[j] + p[k]        case 4: -p[i] - p[j] - p[k]

over all ordered triples, 4*N^3 entries in total.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .errors import InternalConsistencyError, InvalidParameterError
from .geometry import SensorArray

_CASE_SIGNS = {1: (1, 1, 1), 2: (1, 1, -1), 3: (-1, -1, 1), 4: (-1, -1, -1)}


def cross_sum(
    a: Iterable[int], b: Iterable[int], c: Optional[Iterable[int]] = None
) -> set[int]:
    """All pairwise (or triple-wise) sums of elements, deduplicated."""
    a, b = set(a), set(b)
    if not a or not b:
        raise InvalidParameterError("cross_sum arguments must be non-empty")
    if c is None:
        return {x + y for x in a for y in b}
    c = set(c)
    if not c:
        raise InvalidParameterError("cross_sum arguments must be non-empty")
    return {x + y + z for x in a for y in b for z in c}


class LagMultiset:
    """Map from integer lag to positive multiplicity."""

    __slots__ = ("entries",)

    def __init__(self, entries: dict[int, int]):
        if any(m < 1 for m in entries.values()):
            raise InvalidParameterError("multiplicities must be >= 1")
        self.entries = {int(k): int(v) for k, v in sorted(entries.items())}

    @classmethod
    def from_lags(cls, lags: np.ndarray) -> "LagMultiset":
        values, counts = np.unique(np.asarray(lags).ravel(), return_counts=True)
        return cls({int(v): int(c) for v, c in zip(values, counts)})

    def __add__(self, other: "LagMultiset") -> "LagMultiset":
        merged = dict(self.entries)
        for lag, count in other.entries.items():
            merged[lag] = merged.get(lag, 0) + count
        return LagMultiset(merged)

    def __getitem__(self, lag: int) -> int:
        return self.entries.get(int(lag), 0)

    def __contains__(self, lag: int) -> bool:
        return int(lag) in self.entries

    def __eq__(self, other) -> bool:
        return isinstance(other, LagMultiset) and self.entries == other.entries

    def __len__(self) -> int:
        return len(self.entries)

    def __repr__(self) -> str:
        return f"LagMultiset({self.entries!r})"

    @property
    def total(self) -> int:
        """Total multiplicity; equals the number of generating tuples."""
        return sum(self.entries.values())

    def lags(self) -> list[int]:
        return list(self.entries)


@dataclass(frozen=True)
class CoarrayReport:
    """Distinct lags of a virtual co-array plus derived gap analysis.

    ``one_sided_z`` is the largest Z with [-Z, Z] fully contained in the
    lag set (-1 when lag 0 itself is missing); ``holes`` lists the lags
    missing inside [min, max].  A co-array may have a long consecutive
    central segment and still show holes further out, so the usable
    virtual ULA is [-Z, Z], not [min, max].
    """

    phi_u: tuple[int, ...]
    weights: LagMultiset
    size_u: int
    one_sided_z: int
    holes: tuple[int, ...]
    symmetric: bool

    def to_json_dict(self) -> dict:
        return {
            "phi_u": list(self.phi_u),
            "weights": {str(lag): count for lag, count in self.weights.entries.items()},
            "Z": self.one_sided_z,
            "holes": list(self.holes),
            "symmetric": self.symmetric,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2)


def report_from_multiset(weights: LagMultiset) -> CoarrayReport:
    """Derive the gap/segment analysis of a lag multiset."""
    lags = weights.lags()
    present = set(lags)
    lo, hi = lags[0], lags[-1]
    holes = tuple(v for v in range(lo, hi + 1) if v not in present)
    z = -1
    if 0 in present:
        z = 0
        while (z + 1) in present and -(z + 1) in present:
            z += 1
    symmetric = all(-lag in present for lag in lags)
    return CoarrayReport(
        phi_u=tuple(lags),
        weights=weights,
        size_u=len(lags),
        one_sided_z=z,
        holes=holes,
        symmetric=symmetric,
    )


def second_order(array: SensorArray, kind: str) -> CoarrayReport:
    """Second-order difference (DCA) or sum (SCA) co-array with weights."""
    kind = str(kind).strip().lower()
    if kind not in ("dca", "sca"):
        raise InvalidParameterError(f"kind must be 'DCA' or 'SCA', got {kind!r}")
    p = np.asarray(array.positions, dtype=np.int64)
    n = array.size
    if kind == "dca":
        lags = p[:, None] - p[None, :]
    else:
        lags = p[:, None] + p[None, :]
    weights = LagMultiset.from_lags(lags)
    # size bounds that hold for every physical array
    if kind == "dca":
        assert 2 * n - 1 <= len(weights) <= n * n - n + 1
    else:
        assert 2 * n - 1 <= len(weights) <= n * n + n + 1
    assert weights.total == n * n
    return report_from_multiset(weights)


def toca(array: SensorArray, case_j: int) -> LagMultiset:
    """Third-order co-array of one conjugation pattern over N^3 triples."""
    if case_j not in _CASE_SIGNS:
        raise InvalidParameterError(f"case_j must be in 1..4, got {case_j}")
    p = np.asarray(array.positions, dtype=np.int64)
    s1, s2, s3 = _CASE_SIGNS[case_j]
    lags = s1 * p[:, None, None] + s2 * p[None, :, None] + s3 * p[None, None, :]
    return LagMultiset.from_lags(lags)


def to_eca(array: SensorArray) -> CoarrayReport:
    """Third-order exhaustive co-array: all four patterns combined.

    The result is symmetric about lag 0 (patterns 1/4 and 2/3 mirror
    each other) and carries total multiplicity 4*N^3.
    """
    weights = toca(array, 1)
    for j in (2, 3, 4):
        weights = weights + toca(array, j)
    n = array.size
    if weights.total != 4 * n**3:
        raise InternalConsistencyError(
            f"TO-ECA multiplicity {weights.total} != 4*N^3 = {4 * n**3}"
        )
    report = report_from_multiset(weights)
    if not report.symmetric:
        raise InternalConsistencyError("TO-ECA must be symmetric about lag 0")
    return report


def index_lag_map(array: SensorArray) -> np.ndarray:
    """Lag of every entry of the stacked third-order cumulant vector.

    Entry order matches the vectorization used by the simulator: the
    (i1, i2, i3) tensor of case j is flattened in C order and the four
    cases are concatenated, so the 0-based flat index is
    ``(j-1)*N^3 + N^2*i1 + N*i2 + i3``.
    """
    p = np.asarray(array.positions, dtype=np.int64)
    parts = []
    for j in (1, 2, 3, 4):
        s1, s2, s3 = _CASE_SIGNS[j]
        lags = s1 * p[:, None, None] + s2 * p[None, :, None] + s3 * p[None, None, :]
        parts.append(lags.ravel())
    return np.concatenate(parts)


def flat_index(n: int, case_j: int, l1: int, l2: int, l3: int) -> int:
    """0-based position of cumulant entry (case_j; l1, l2, l3), 1-based l's."""
    if case_j not in _CASE_SIGNS:
        raise InvalidParameterError(f"case_j must be in 1..4, got {case_j}")
    if not all(1 <= l <= n for l in (l1, l2, l3)):
        raise InvalidParameterError("sensor indices must be in 1..N")
    return (case_j - 1) * n**3 + n * n * (l1 - 1) + n * (l2 - 1) + (l3 - 1)


def brute_force_lag_multiset(positions: Iterable[int]) -> LagMultiset:
    """Independent O(4*N^3) python-loop oracle for :func:`to_eca` weights.

    Kept deliberately free of numpy so tests can cross-check the
    vectorized path against straight enumeration.
    """
    pos = list(positions)
    counts: dict[int, int] = {}
    for s1, s2, s3 in _CASE_SIGNS.values():
        for a, b, c in itertools.product(pos, repeat=3):
            lag = s1 * a + s2 * b + s3 * c
            counts[lag] = counts.get(lag, 0) + 1
    return LagMultiset(counts)
