"""Quality indicators: IGD+, hypervolume (exact 2-D and Monte Carlo), Spacing."""

from __future__ import annotations

import numpy as np

# reported in place of NaN when a run ends without any feasible solution
IGD_PLUS_SENTINEL = 100.0
HV_SENTINEL = 0.0


def _as_points(points) -> np.ndarray:
    pts = getattr(points, "points", points)
    pts = np.asarray(pts, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(1, -1) if pts.size else pts.reshape(0, 0)
    return pts


def nondominated_mask(F) -> np.ndarray:
    """Boolean mask of rows of ``F`` not Pareto-dominated by any other row."""
    F = _as_points(F)
    n = len(F)
    if n == 0:
        return np.zeros(0, dtype=bool)
    if F.shape[1] == 2:
        order = np.lexsort((F[:, 1], F[:, 0]))
        mask = np.zeros(n, dtype=bool)
        best = np.inf
        last = None
        for i in order:
            f1, f2 = F[i]
            if f2 < best or (last is not None and f1 == last[0] and f2 == last[1]):
                mask[i] = True
                best = f2
                last = (f1, f2)
        return mask
    le = np.all(F[:, None, :] <= F[None, :, :], axis=2)
    lt = np.any(F[:, None, :] < F[None, :, :], axis=2)
    dominated = np.any(le & lt, axis=0)
    return ~dominated


def igd_plus(approx, reference) -> float:
    """Mean over reference points of the dominance-clamped distance to the nearest approx point."""
    A = _as_points(approx)
    R = _as_points(reference)
    if A.size == 0 or R.size == 0:
        raise ValueError("igd_plus needs nonempty approximation and reference sets")
    if A.shape[1] != R.shape[1]:
        raise ValueError(f"objective dimensions differ: {A.shape[1]} vs {R.shape[1]}")
    diff = np.maximum(A[None, :, :] - R[:, None, :], 0.0)
    d = np.sqrt(np.sum(diff * diff, axis=2))
    return float(np.mean(np.min(d, axis=1)))


def hypervolume_2d(approx, ref_point) -> float:
    A = _as_points(approx)
    ref = np.asarray(ref_point, dtype=float)
    if A.size == 0:
        return 0.0
    if A.shape[1] != 2 or ref.shape != (2,):
        raise ValueError("hypervolume_2d is defined for two objectives only")
    A = A[np.all(A < ref, axis=1)]
    if len(A) == 0:
        return 0.0
    A = A[nondominated_mask(A)]
    A = A[np.lexsort((A[:, 1], A[:, 0]))]
    right = np.append(A[1:, 0], ref[0])
    return float(np.sum((right - A[:, 0]) * (ref[1] - A[:, 1])))


def hypervolume_mc(approx, ref_point, samples: int = 100_000, rng=None,
                   chunk: int = 100_000) -> float:
    """Monte Carlo estimate of the volume dominated by ``approx`` up to ``ref_point``.

    Samples are drawn uniformly in the box spanned by the ideal point of the
    contributing set and ``ref_point``; works for any number of objectives.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(rng)
    A = _as_points(approx)
    ref = np.asarray(ref_point, dtype=float)
    if A.size == 0:
        return 0.0
    A = A[np.all(A < ref, axis=1)]
    if len(A) == 0:
        return 0.0
    A = A[nondominated_mask(A)]
    ideal = A.min(axis=0)
    box = float(np.prod(ref - ideal))
    hits = 0
    done = 0
    while done < samples:
        k = min(chunk, samples - done)
        u = ideal + rng.random((k, len(ref))) * (ref - ideal)
        covered = np.zeros(k, dtype=bool)
        for a in A:
            covered |= np.all(a <= u, axis=1)
        hits += int(covered.sum())
        done += k
    return box * hits / samples


def spacing(approx) -> float:
    """Schott's spacing: sample std of nearest-neighbour Manhattan distances."""
    A = _as_points(approx)
    if A.size == 0:
        raise ValueError("spacing needs a nonempty set")
    if len(A) == 1:
        return 0.0
    d = np.sum(np.abs(A[:, None, :] - A[None, :, :]), axis=2)
    np.fill_diagonal(d, np.inf)
    nearest = d.min(axis=1)
    return float(np.std(nearest, ddof=1))


def normalized_hv(approx, front, ref_value: float = 1.1) -> float:
    """HV after scaling objectives by the front's ideal and nadir points, ref (1.1, 1.1)."""
    F = _as_points(front)
    ideal, nadir = F.min(axis=0), F.max(axis=0)
    span = np.where(nadir > ideal, nadir - ideal, 1.0)
    A = (_as_points(approx) - ideal) / span
    return hypervolume_2d(A, np.full(F.shape[1], ref_value))


def final_quality(objectives, violations, front) -> tuple:
    """(IGD+, HV) of the feasible part of a solution set; NaN pair if none is feasible."""
    F = _as_points(objectives)
    cv = np.asarray(violations, dtype=float)
    feasible = F[cv == 0.0] if F.size else F
    if len(feasible) == 0:
        return float("nan"), float("nan")
    return igd_plus(feasible, front), normalized_hv(feasible, front)
