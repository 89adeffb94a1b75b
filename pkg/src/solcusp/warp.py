"""Warping-function families for the cusp metric.

Three families are provided:

* ``PureExp``     -- f(t) = e^(-t)
* ``ShiftedExp``  -- f(t) = 1 + e^(-t)
* ``Interpolated``-- equals PureExp for t <= T0 and ShiftedExp for t >= T1,
  glued with a C-infinity bump-quotient step so that f, f', f'' are smooth
  across both junctions.

A warp f is admissible for negative curvature when four pointwise margins
are all positive:

    a = f - 1,   b = -f',   c = f'',   d = 1 - f*f' - (1 + f'/f)^2

``build_interpolation`` searches for a transition window wide enough that
all four margins stay above a requested floor on a dense validation grid,
widening the window geometrically until validation passes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "PureExp",
    "ShiftedExp",
    "Interpolated",
    "ConditionMargins",
    "InterpolationError",
    "check_conditions",
    "condition_margins",
    "build_interpolation",
    "warp_from_name",
]

# exp(g) with |g| beyond this is numerically 0 or 1 in the step quotient
_STEP_CLIP = 500.0


class InterpolationError(RuntimeError):
    """No transition window satisfying the margin floor was found."""


@dataclass(frozen=True)
class PureExp:
    """f(t) = e^(-t); satisfies the four margin conditions for t < 0 only."""

    family: str = "pure-exp"

    def eval(self, t: float) -> tuple[float, float, float]:
        f = float(np.exp(-t))
        return f, -f, f

    def eval_array(self, t: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        f = np.exp(-np.asarray(t, dtype=float))
        return f, -f, f


@dataclass(frozen=True)
class ShiftedExp:
    """f(t) = 1 + e^(-t); satisfies the four margin conditions for all t."""

    family: str = "shifted-exp"

    def eval(self, t: float) -> tuple[float, float, float]:
        e = float(np.exp(-t))
        return 1.0 + e, -e, e

    def eval_array(self, t: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        e = np.exp(-np.asarray(t, dtype=float))
        return 1.0 + e, -e, e


def _smooth_step(u: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """C-infinity step s(u) with s=0 for u<=0, s=1 for u>=1.

    s(u) = phi(u) / (phi(u) + phi(1-u)) with phi(u) = exp(-1/u), written as
    a logistic in g(u) = 1/u - 1/(1-u) so that s, s', s'' stay finite in
    floating point all the way to the endpoints.  Returns (s, s', s'').
    """
    u = np.asarray(u, dtype=float)
    s = np.zeros_like(u)
    s1 = np.zeros_like(u)
    s2 = np.zeros_like(u)

    lo = u <= 0.0
    hi = u >= 1.0
    mid = ~(lo | hi)
    s[hi] = 1.0

    if np.any(mid):
        um = u[mid]
        g = 1.0 / um - 1.0 / (1.0 - um)
        # within +-_STEP_CLIP the logistic and its first two derivatives are
        # representable; outside, s is 0 or 1 to far below double precision
        inner = np.abs(g) < _STEP_CLIP
        sm = np.where(g <= -_STEP_CLIP, 1.0, 0.0)
        s1m = np.zeros_like(um)
        s2m = np.zeros_like(um)
        if np.any(inner):
            ui = um[inner]
            gi = g[inner]
            sig = 1.0 / (1.0 + np.exp(gi))      # s = sigma(g)
            w = sig * (1.0 - sig)               # |sigma'|
            g1 = -1.0 / ui**2 - 1.0 / (1.0 - ui) ** 2
            g2 = 2.0 / ui**3 - 2.0 / (1.0 - ui) ** 3
            sm[inner] = sig
            s1m[inner] = -w * g1
            s2m[inner] = w * (1.0 - 2.0 * sig) * g1**2 - w * g2
        s[mid] = sm
        s1[mid] = s1m
        s2[mid] = s2m
    return s, s1, s2


@dataclass(frozen=True)
class Interpolated:
    """PureExp for t <= t_lo, ShiftedExp for t >= t_hi, smooth in between.

    f(t) = e^(-t) + s((t - t_lo)/(t_hi - t_lo)) with the C-infinity step s,
    so the junction values and all derivatives match the closed forms
    exactly at both ends of the transition.
    """

    t_lo: float
    t_hi: float
    family: str = "interpolated"

    def __post_init__(self) -> None:
        if not (self.t_lo < self.t_hi <= 0.0):
            raise ValueError(
                f"need t_lo < t_hi <= 0, got ({self.t_lo}, {self.t_hi})"
            )

    def eval(self, t: float) -> tuple[float, float, float]:
        f, fp, fpp = self.eval_array(np.array([t], dtype=float))
        return float(f[0]), float(fp[0]), float(fpp[0])

    def eval_array(self, t: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        t = np.asarray(t, dtype=float)
        width = self.t_hi - self.t_lo
        u = (t - self.t_lo) / width
        s, s1, s2 = _smooth_step(u)
        e = np.exp(-t)
        f = e + s
        fp = -e + s1 / width
        fpp = e + s2 / width**2
        return f, fp, fpp


@dataclass(frozen=True)
class ConditionMargins:
    """Pointwise margins of the four negativity conditions at t.

    All four conditions hold at t iff every margin is strictly positive.
    """

    t: float
    a: float  # f - 1
    b: float  # -f'
    c: float  # f''
    d: float  # 1 - f*f' - (1 + f'/f)^2

    @property
    def min(self) -> float:
        return min(self.a, self.b, self.c, self.d)


def condition_margins(warp, t: np.ndarray) -> np.ndarray:
    """Vectorized margins; returns an (n, 4) array of (a, b, c, d).

    Raises ValueError if f(t) <= 0 anywhere on the grid (margin d divides
    by f).
    """
    t = np.asarray(t, dtype=float)
    if t.size == 0:
        raise ValueError("grid must be nonempty")
    f, fp, fpp = warp.eval_array(t)
    if np.any(f <= 0.0):
        bad = float(t[np.argmax(f <= 0.0)])
        raise ValueError(f"f(t) <= 0 at t={bad}; margin d is undefined there")
    a = f - 1.0
    b = -fp
    c = fpp
    d = 1.0 - f * fp - (1.0 + fp / f) ** 2
    return np.stack([a, b, c, d], axis=1)


def check_conditions(warp, grid) -> list[ConditionMargins]:
    """Margins of conditions a-d at every grid point, in grid order."""
    grid = np.asarray(grid, dtype=float)
    m = condition_margins(warp, grid)
    return [
        ConditionMargins(float(t), float(a), float(b), float(c), float(d))
        for t, (a, b, c, d) in zip(grid, m)
    ]


def _validate(warp: Interpolated, grid_step: float, margin_floor: float):
    grid = np.arange(warp.t_lo - 2.0, 1.0 + grid_step / 2, grid_step)
    m = condition_margins(warp, grid)
    mins = m.min(axis=0)
    ok = bool(np.all(m > margin_floor))
    i, j = np.unravel_index(np.argmin(m), m.shape)
    worst = (float(grid[i]), "abcd"[j], float(m[i, j]))
    return ok, mins, worst


def build_interpolation(
    t_lo: float,
    t_hi: float,
    grid_step: float = 1e-3,
    margin_floor: float = 1e-6,
    max_widenings: int = 20,
) -> Interpolated:
    """Construct a validated interpolation between e^(-t) and 1 + e^(-t).

    Starting from the window (t_lo, t_hi), checks all four margins on the
    dense grid [t_lo - 2, 1] with the given step.  If any margin falls at
    or below ``margin_floor`` the window is widened, t_lo <- t_hi -
    2*(t_hi - t_lo), up to ``max_widenings`` times.  Raises
    InterpolationError with the worst (t, condition, margin) if no window
    validates.
    """
    if not (t_lo < t_hi <= 0.0):
        raise ValueError(f"need t_lo < t_hi <= 0, got ({t_lo}, {t_hi})")
    if grid_step <= 0.0:
        raise ValueError("grid_step must be positive")
    if margin_floor < 0.0:
        raise ValueError("margin_floor must be nonnegative")

    lo = float(t_lo)
    worst_seen = None
    for _ in range(max_widenings + 1):
        warp = Interpolated(lo, float(t_hi))
        ok, _, worst = _validate(warp, grid_step, margin_floor)
        if ok:
            return warp
        worst_seen = worst
        lo = t_hi - 2.0 * (t_hi - lo)
    t_w, cond, val = worst_seen
    raise InterpolationError(
        f"no valid transition window down to t_lo={lo}: worst margin "
        f"({cond}) = {val:.3e} at t = {t_w:.6f}"
    )


def warp_from_name(name: str, t_lo: float | None = None, t_hi: float | None = None):
    """CLI helper: map a family name to a warp instance."""
    if name == "pure-exp":
        return PureExp()
    if name == "shifted-exp":
        return ShiftedExp()
    if name == "interpolated":
        if t_lo is None or t_hi is None:
            raise ValueError("interpolated warp needs t_lo and t_hi")
        return Interpolated(float(t_lo), float(t_hi))
    raise ValueError(f"unknown warp family: {name!r}")
