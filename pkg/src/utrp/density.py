"""Piecewise-polynomial probability densities on a bounded support.

Each piece covers ``[lo, hi)`` and carries a polynomial ``p`` over the
normalized coordinate ``s = (t - lo) / (hi - lo)`` in ``[0, 1]``.  The density
at ``t`` is ``p(s) / (hi - lo)``, so the probability mass of a piece is simply
``integral of p over [0, 1]``.  This keeps coefficients independent of the time
unit and makes affine maps of the time axis trivial (only the bounds move).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import ValidationError

MASS_TOL = 1e-9
_NEG_TOL = 1e-12


@dataclass(frozen=True)
class DensityPiece:
    lo: float
    hi: float
    coeffs: tuple[float, ...]

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValidationError("density piece bounds must be finite")
        if not self.lo < self.hi:
            raise ValidationError(f"density piece needs lo < hi, got [{self.lo}, {self.hi}]")
        if len(self.coeffs) == 0:
            raise ValidationError("density piece needs at least one coefficient")
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mass(self) -> float:
        return float(np.sum(P.polyint(self.coeffs)))

    def min_shape_value(self) -> float:
        """Smallest value of the shape polynomial on ``[0, 1]``."""
        c = np.asarray(self.coeffs)
        candidates = [0.0, 1.0]
        if len(c) > 2:
            for r in P.polyroots(P.polyder(c)):
                if abs(r.imag) < 1e-12 and 0.0 < r.real < 1.0:
                    candidates.append(r.real)
        return float(np.min(P.polyval(np.asarray(candidates), c)))


@dataclass(frozen=True)
class PiecewiseDensity:
    """Normalized density made of contiguous polynomial pieces."""

    pieces: tuple[DensityPiece, ...]

    def __post_init__(self):
        pieces = tuple(self.pieces)
        object.__setattr__(self, "pieces", pieces)
        if not pieces:
            raise ValidationError("a density needs at least one piece")
        for a, b in zip(pieces, pieces[1:]):
            if a.hi != b.lo:
                raise ValidationError(
                    f"density pieces must be contiguous: {a.hi} != {b.lo}"
                )
        for piece in pieces:
            if piece.min_shape_value() < -_NEG_TOL:
                raise ValidationError(
                    f"density is negative on piece [{piece.lo}, {piece.hi}]"
                )
        total = self.mass
        if abs(total - 1.0) > MASS_TOL:
            raise ValidationError(f"density integrates to {total!r}, expected 1")

    @classmethod
    def uniform(cls, lo: float, hi: float) -> PiecewiseDensity:
        return cls((DensityPiece(lo, hi, (1.0,)),))

    @classmethod
    def from_pieces(
        cls,
        pieces: Iterable[tuple[float, float, Sequence[float]]],
        *,
        tol: float = 1e-6,
    ) -> PiecewiseDensity:
        """Build a density, rescaling away a mass deviation of at most ``tol``.

        Raises ValidationError when the raw pieces integrate further than
        ``tol`` from 1.
        """
        raw = [DensityPiece(lo, hi, tuple(c)) for lo, hi, c in pieces]
        total = math.fsum(p.mass for p in raw)
        if not math.isfinite(total) or abs(total - 1.0) > tol:
            raise ValidationError(f"density integrates to {total!r}, expected 1 within {tol}")
        if total != 1.0:
            raw = [DensityPiece(p.lo, p.hi, tuple(c / total for c in p.coeffs)) for p in raw]
        return cls(tuple(raw))

    @property
    def mass(self) -> float:
        return math.fsum(p.mass for p in self.pieces)

    @property
    def support(self) -> tuple[float, float]:
        return self.pieces[0].lo, self.pieces[-1].hi

    @property
    def degree(self) -> int:
        return max(len(p.coeffs) for p in self.pieces) - 1

    def is_uniform(self) -> bool:
        return len(self.pieces) == 1 and len(self.pieces[0].coeffs) == 1

    @property
    def breakpoints(self) -> list[float]:
        return [p.lo for p in self.pieces] + [self.pieces[-1].hi]

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for piece in self.pieces:
            inside = (x >= piece.lo) & (x < piece.hi)
            if piece is self.pieces[-1]:
                inside |= x == piece.hi
            s = (x[inside] - piece.lo) / piece.width
            out[inside] = P.polyval(s, piece.coeffs) / piece.width
        return out

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for piece in self.pieces:
            anti = P.polyint(piece.coeffs)
            s = np.clip((x - piece.lo) / piece.width, 0.0, 1.0)
            out += P.polyval(s, anti)
        return np.clip(out, 0.0, 1.0)

    def affine(self, shift: float, scale: float) -> PiecewiseDensity:
        """Density of ``shift + scale * X`` for ``scale > 0``."""
        if scale <= 0:
            raise ValueError("scale must be positive")
        return PiecewiseDensity(
            tuple(
                DensityPiece(shift + scale * p.lo, shift + scale * p.hi, p.coeffs)
                for p in self.pieces
            )
        )

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Draw ``size`` values; consumes two uniform vectors of length ``size``."""
        u_piece = rng.random(size)
        u_inner = rng.random(size)
        masses = np.array([p.mass for p in self.pieces])
        cum = np.cumsum(masses)
        idx = np.minimum(np.searchsorted(cum, u_piece * cum[-1], side="right"), len(masses) - 1)
        out = np.empty(size)
        for k, piece in enumerate(self.pieces):
            sel = idx == k
            if not sel.any():
                continue
            if len(piece.coeffs) == 1:
                s = u_inner[sel]
            else:
                s = _invert_cdf(piece.coeffs, u_inner[sel])
            out[sel] = piece.lo + s * piece.width
        return out


def _invert_cdf(coeffs: Sequence[float], u: np.ndarray) -> np.ndarray:
    """Solve ``F(s) = u * F(1)`` on ``[0, 1]`` by vectorized bisection."""
    anti = P.polyint(coeffs)
    target = u * P.polyval(1.0, anti)
    lo = np.zeros_like(u)
    hi = np.ones_like(u)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        below = P.polyval(mid, anti) < target
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)
