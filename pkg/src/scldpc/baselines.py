"""Cutting-vector and minimum-overlap partitioning baselines.

Both act on an array-based block code and are scored by the lifted
(3,3,3,0) count at coupling length L, so the optimal-overlap pipeline can be
compared against them on equal footing.
"""

from __future__ import annotations

import itertools
import math
import os
import random
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

from .cycles import count_ugast_3330_for
from .overlap import OverlapVector, enumerate_valid_overlaps
from .qc import PartitionMask, ProtoMatrix

__all__ = [
    "cv_mask",
    "cv_exhaustive_best",
    "mo_admissible_vectors",
    "pattern_counts",
    "masks_for_vector",
    "MoSearchResult",
    "mo_search",
    "mo_best",
    "worker_count",
]


def worker_count() -> int:
    """Worker count for the exhaustive searches, from SCLDPC_WORKERS."""
    try:
        return max(1, int(os.environ.get("SCLDPC_WORKERS", "1")))
    except ValueError:
        return 1


def cv_mask(zeta: Sequence[int], kappa: int) -> PartitionMask:
    """Cutting-vector split: circulant (i, j) goes to H0 iff j < zeta[i]."""
    if list(zeta) != sorted(zeta):
        raise ValueError(f"cutting vector must be ascending, got {list(zeta)}")
    if zeta[-1] > kappa or zeta[0] < 0:
        raise ValueError("cutting vector entries must lie in [0, kappa]")
    return PartitionMask(
        tuple(tuple(0 if j < zeta[i] else 1 for j in range(kappa)) for i in range(len(zeta)))
    )


def _score_cv(args) -> tuple[int, tuple[int, ...]]:
    proto, zeta, L = args
    mask = cv_mask(zeta, proto.kappa)
    return count_ugast_3330_for(proto, mask, L), tuple(zeta)


def cv_exhaustive_best(
    proto: ProtoMatrix, L: int, workers: Optional[int] = None
) -> tuple[tuple[int, ...], int]:
    """Best ascending cutting vector by exhaustive search.

    Returns (zeta, lifted (3,3,3,0) count).  Ties break toward the
    lexicographically smallest vector.
    """
    if proto.gamma != 3:
        raise ValueError("baselines are defined for column weight 3")
    zetas = list(itertools.combinations_with_replacement(range(proto.kappa + 1), 3))
    jobs = [(proto, z, L) for z in zetas]
    workers = worker_count() if workers is None else workers
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_score_cv, jobs, chunksize=32))
    else:
        results = [_score_cv(j) for j in jobs]
    count, zeta = min(results)
    return zeta, count


def mo_admissible_vectors(kappa: int) -> list[OverlapVector]:
    """Overlap vectors passing the minimum-overlap admissibility rule.

    Balanced split (inherited from the vector validity chains), per-row
    populations of both halves within floor(kappa/2) +/- 1, and minimal
    (max, total) pairwise overlap across the six row pairs of both halves.
    """
    lo, hi = kappa // 2 - 1, kappa // 2 + 1
    scored = []
    for v in enumerate_valid_overlaps(kappa):
        rows = (v.r0, v.r1, v.r2)
        if not all(lo <= r <= hi and lo <= kappa - r <= hi for r in rows):
            continue
        c = v.complement(kappa)
        ovl = (v.o01, v.o02, v.o12, c.o01, c.o02, c.o12)
        scored.append(((max(ovl), sum(ovl)), v))
    if not scored:
        return []
    best = min(s for s, _ in scored)
    return [v for s, v in scored if s == best]


PATTERNS = tuple(itertools.product((0, 1), repeat=3))


def pattern_counts(vector: OverlapVector, kappa: int) -> dict[tuple[int, int, int], int]:
    """Column-pattern multiset of any mask realizing the vector.

    A pattern is the mask column read downward (0 = H0); e.g. (0, 0, 1) are
    the columns counted by o01 but not o012.
    """
    v = vector
    counts = {
        (0, 0, 0): v.o012,
        (0, 0, 1): v.o01 - v.o012,
        (0, 1, 0): v.o02 - v.o012,
        (1, 0, 0): v.o12 - v.o012,
        (0, 1, 1): v.r0 - v.o01 - v.o02 + v.o012,
        (1, 0, 1): v.r1 - v.o01 - v.o12 + v.o012,
        (1, 1, 0): v.r2 - v.o02 - v.o12 + v.o012,
    }
    counts[(1, 1, 1)] = kappa - sum(counts.values())
    if any(c < 0 for c in counts.values()):
        raise ValueError(f"vector {v.as_list()} is not realizable at kappa={kappa}")
    return counts


def _masks_from_counts(
    counts: dict, kappa: int, fixed: dict[int, tuple[int, int, int]]
) -> Iterator[PartitionMask]:
    remaining = dict(counts)
    for col, pat in fixed.items():
        if remaining.get(pat, 0) <= 0:
            return
        remaining[pat] -= 1
    free_cols = [c for c in range(kappa) if c not in fixed]
    classes = [(pat, remaining[pat]) for pat in PATTERNS if remaining[pat] > 0]

    def rec(idx: int, pool: tuple, assigned: dict):
        if idx == len(classes):
            cols_pat = dict(fixed)
            cols_pat.update(assigned)
            yield PartitionMask(
                tuple(tuple(cols_pat[c][i] for c in range(kappa)) for i in range(3))
            )
            return
        pat, cnt = classes[idx]
        if idx == len(classes) - 1:
            # last class takes everything left
            yield from rec(idx + 1, (), {**assigned, **{c: pat for c in pool}})
            return
        for chosen in itertools.combinations(pool, cnt):
            rest = tuple(c for c in pool if c not in chosen)
            yield from rec(idx + 1, rest, {**assigned, **{c: pat for c in chosen}})

    yield from rec(0, tuple(free_cols), {})


def masks_for_vector(vector: OverlapVector, kappa: int) -> Iterator[PartitionMask]:
    """Every mask realizing the overlap vector, in deterministic order."""
    yield from _masks_from_counts(pattern_counts(vector, kappa), kappa, {})


def _constrained_mask_count(counts: dict, fixed_patterns: Sequence[tuple]) -> int:
    remaining = dict(counts)
    for pat in fixed_patterns:
        if remaining.get(pat, 0) <= 0:
            return 0
        remaining[pat] -= 1
    total = sum(remaining.values())
    out = math.factorial(total)
    for c in remaining.values():
        out //= math.factorial(c)
    return out


def _symmetry_anchors(counts: dict) -> Optional[tuple[tuple, tuple]]:
    """Two patterns to pin at columns 0 and 1, minimizing the orbit overcount.

    Array-based powers are invariant under affine column relabelings
    j -> a*j + b, which act sharply 2-transitively, so every relabeling orbit
    contains a mask carrying any chosen (ordered) pattern pair at columns
    (0, 1).  Pinning the rarest pair shrinks the search the most.
    """
    nonempty = [(pat, c) for pat, c in sorted(counts.items()) if c > 0]
    if len(nonempty) < 2 and (not nonempty or nonempty[0][1] < 2):
        return None
    best = None
    for (pa, ca), (pb, cb) in itertools.permutations(nonempty, 2):
        key = (ca * cb, pa, pb)
        if best is None or key < best:
            best = key
    for pa, ca in nonempty:
        if ca >= 2:
            key = (ca * (ca - 1), pa, pa)
            if best is None or key < best:
                best = key
    return best[1], best[2]


@dataclass(frozen=True)
class MoSearchResult:
    mask: PartitionMask
    count: int
    exhaustive: bool
    masks_scored: int


def mo_search(
    proto: ProtoMatrix,
    L: int,
    max_masks: Optional[int] = None,
    seed: int = 0,
) -> MoSearchResult:
    """Minimum-overlap search over all admissible vectors.

    With array-based powers the affine column symmetry cuts each vector's
    realization space by up to p(p-1) without losing any census value.  When
    the reduced space still exceeds ``max_masks`` the search falls back to a
    seeded uniform sample of pattern shuffles and the result is flagged
    non-exhaustive.
    """
    if proto.gamma != 3:
        raise ValueError("baselines are defined for column weight 3")
    kappa = proto.kappa
    ab = tuple(tuple((i * j) % proto.p for j in range(kappa)) for i in range(3))
    symmetric = kappa == proto.p and proto.powers == ab
    vectors = mo_admissible_vectors(kappa)
    if not vectors:
        raise ValueError(f"no admissible minimum-overlap vector at kappa={kappa}")

    plans = []
    total = 0
    for vec in vectors:
        counts = pattern_counts(vec, kappa)
        anchors = _symmetry_anchors(counts) if symmetric else None
        if anchors is not None:
            n = _constrained_mask_count(counts, anchors)
            fixed = {0: anchors[0], 1: anchors[1]}
        else:
            n = _constrained_mask_count(counts, ())
            fixed = {}
        plans.append((vec, counts, fixed, n))
        total += n

    best: Optional[tuple[int, PartitionMask]] = None
    scored = 0
    if max_masks is None or total <= max_masks:
        for _, counts, fixed, _ in plans:
            for mask in _masks_from_counts(counts, kappa, fixed):
                count = count_ugast_3330_for(proto, mask, L)
                scored += 1
                if best is None or count < best[0]:
                    best = (count, mask)
        return MoSearchResult(best[1], best[0], exhaustive=True, masks_scored=scored)

    rng = random.Random(seed)
    per_vec = max(1, max_masks // len(plans))
    for _, counts, fixed, _ in plans:
        pool = []
        for pat, c in counts.items():
            pool.extend([pat] * c)
        for _ in range(per_vec):
            rng.shuffle(pool)
            arrangement = list(pool)
            ok = True
            for col, pat in fixed.items():
                if arrangement[col] != pat:
                    try:
                        swap = next(
                            i for i, q in enumerate(arrangement)
                            if q == pat and i not in fixed
                        )
                    except StopIteration:
                        ok = False
                        break
                    arrangement[col], arrangement[swap] = arrangement[swap], arrangement[col]
            if not ok:
                continue
            mask = PartitionMask(
                tuple(tuple(arrangement[c][i] for c in range(kappa)) for i in range(3))
            )
            count = count_ugast_3330_for(proto, mask, L)
            scored += 1
            if best is None or count < best[0]:
                best = (count, mask)
    return MoSearchResult(best[1], best[0], exhaustive=False, masks_scored=scored)


def mo_best(proto: ProtoMatrix, L: int) -> tuple[PartitionMask, int]:
    """Best minimum-overlap mask by lifted (3,3,3,0) count (exhaustive)."""
    res = mo_search(proto, L)
    return res.mask, res.count
