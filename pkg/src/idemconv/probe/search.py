"""Best-first branch and bound for preimages in an epsilon-ball.

For a source point ``x``, a radius ``eps`` and targets ``y``, the search
subdivides boxes of free generator weights. A box is discarded when the
monotone enclosure of its points misses the eps-box around ``x`` or the
enclosure of their images misses the ``tol``-box around ``y``; both
enclosures are exact at the box corners because ``comb`` and the map are
monotone. A target is

* ``covered`` when some box center lies in the eps-ball and maps within
  ``tol + L*r`` of ``y``, or a box narrower than the resolution ``r``
  survives (then every point of it maps within ``tol + L*r``);
* ``certified`` when every box is discarded, which proves that no point of
  the eps-ball maps within ``tol`` of ``y``;
* ``undecided`` when the box budget runs out first.

A cheap pre-pass evaluates the map on random points of the eps-ball; a
sample mapping within ``tol + L*r`` covers its target before any box is
refined.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chart import ChartMap

__all__ = ["SearchResult", "preimage_search", "COVERED", "CERTIFIED", "UNDECIDED"]

COVERED = "covered"
CERTIFIED = "certified"
UNDECIDED = "undecided"

# exclusion needs a strict gap of this size, so rounding never certifies wrongly
MARGIN = 1e-12


@dataclass
class SearchResult:
    status: list
    boxes: np.ndarray
    residual: np.ndarray
    hit: np.ndarray

    def count(self, status: str) -> int:
        return sum(1 for s in self.status if s == status)


def _evaluate(cmap: ChartMap, x, eps, targets, tol, slack, resolution, tid, faces, lo, hi):
    src = cmap.source
    zlo = src.points(faces, lo)
    zhi = src.points(faces, hi)
    mid = 0.5 * (lo + hi)
    zc = src.points(faces, mid)
    y = targets[tid]
    flo, fhi, fc = cmap(zlo), cmap(zhi), cmap(zc)
    out_eps = ((zhi < x - eps - MARGIN) | (zlo > x + eps + MARGIN)).any(axis=1)
    out_tgt = ((fhi < y - tol - MARGIN) | (flo > y + tol + MARGIN)).any(axis=1)
    alive = ~(out_eps | out_tgt)
    dx = np.abs(zc - x).max(axis=1)
    res = np.abs(fc - y).max(axis=1) if y.shape[1] else np.zeros(len(tid))
    width = (hi - lo).max(axis=1) if lo.shape[1] else np.zeros(len(tid))
    hit = alive & (((dx <= eps) & (res <= tol + slack)) | (width <= resolution))
    score = np.maximum(res - tol, 0.0) + np.maximum(dx - eps, 0.0)
    return alive, hit, score, res, zc


def preimage_search(cmap: ChartMap, x: np.ndarray, eps: float, targets: np.ndarray,
                    tol: float, resolution: float, batch: int = 32,
                    budget: int = 200_000, presample: int = 4096, seed: int = 0) -> SearchResult:
    """Decide coverage of each target row by the image of the eps-ball around ``x``.

    ``x`` and ``targets`` are chart coordinates. ``batch`` boxes per target
    are refined per round, best first; ``budget`` caps the boxes examined per
    target. ``presample`` random eps-ball points (drawn with ``seed``) are
    tried first.
    """
    src = cmap.source
    targets = np.atleast_2d(np.asarray(targets, dtype=float))
    n_t = targets.shape[0]
    slack = cmap.parameter_lipschitz * resolution
    status = [None] * n_t
    boxes = np.zeros(n_t, dtype=int)
    best = np.full(n_t, np.inf)
    hits = np.full((n_t, src.dim), np.nan)

    if presample and n_t:
        pts = src.local_samples(x, eps, presample, np.random.default_rng(seed))
        if len(pts):
            gap = np.abs(targets[:, None, :] - cmap(pts)[None, :, :]).max(axis=2)
            j = gap.argmin(axis=1)
            near = gap[np.arange(n_t), j]
            for t in np.flatnonzero(near <= tol + slack):
                status[t] = COVERED
                hits[t] = pts[j[t]]
            best = np.minimum(best, near)

    n_f = len(src.faces)
    open_t = np.array([t for t in range(n_t) if status[t] is None], dtype=int)
    if not len(open_t):
        return SearchResult(status, boxes, best, hits)
    tid = np.repeat(open_t, n_f)
    faces = np.tile(src.faces, (len(open_t), 1))
    lo = np.zeros((len(tid), src.free_dim))
    hi = np.ones((len(tid), src.free_dim))

    pool = None
    while True:
        alive, hit, score, res, zc = _evaluate(cmap, x, eps, targets, tol, slack, resolution,
                                               tid, faces, lo, hi)
        np.add.at(boxes, tid, 1)
        np.minimum.at(best, tid, np.where(alive, res, np.inf))
        for i in np.flatnonzero(hit):
            t = tid[i]
            if status[t] is None:
                status[t] = COVERED
                hits[t] = zc[i]
        over = np.flatnonzero(boxes > budget)
        for t in over:
            if status[t] is None:
                status[t] = UNDECIDED
        done = np.array([s is not None for s in status])

        keep = alive & ~hit & ~done[tid]
        new = (tid[keep], faces[keep], lo[keep], hi[keep], score[keep])
        if pool is None:
            pool = new
        else:
            live = ~done[pool[0]]
            pool = tuple(np.concatenate([p[live], q]) for p, q in zip(pool, new))
        p_tid, p_faces, p_lo, p_hi, p_score = pool

        empty = np.bincount(p_tid, minlength=n_t) == 0
        for t in np.flatnonzero(empty):
            if status[t] is None:
                status[t] = CERTIFIED
        if len(p_tid) == 0:
            break

        order = np.lexsort((p_score, p_tid))
        sorted_tid = p_tid[order]
        starts = np.searchsorted(sorted_tid, sorted_tid, side="left")
        rank = np.arange(len(order)) - starts
        take = np.zeros(len(order), dtype=bool)
        take[order[rank < batch]] = True
        sel = np.flatnonzero(take)
        rest = np.flatnonzero(~take)
        pool = tuple(p[rest] for p in pool)

        s_lo, s_hi = p_lo[sel], p_hi[sel]
        dim = np.argmax(s_hi - s_lo, axis=1)
        rows = np.arange(len(sel))
        midv = 0.5 * (s_lo[rows, dim] + s_hi[rows, dim])
        lo_a, hi_a = s_lo.copy(), s_hi.copy()
        hi_a[rows, dim] = midv
        lo_b, hi_b = s_lo.copy(), s_hi.copy()
        lo_b[rows, dim] = midv
        tid = np.concatenate([p_tid[sel], p_tid[sel]])
        faces = np.concatenate([p_faces[sel], p_faces[sel]])
        lo = np.concatenate([lo_a, lo_b])
        hi = np.concatenate([hi_a, hi_b])

    return SearchResult(status, boxes, best, hits)
