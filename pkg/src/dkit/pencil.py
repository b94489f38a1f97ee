"""Matrix pencils sF - G: regularity and the finite/infinite spectrum split.

The characteristic polynomial det(sF - G) is obtained by evaluating the
determinant at the nodes s = 0, 1, ..., n and interpolating, which is
exact over rationals and adequately conditioned at desk scale for floats.
Its degree p counts the finite eigenvalues with multiplicity; the
remaining q = n - p dimensions belong to the infinite eigenvalue.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from . import linalg
from .errors import UnresolvableSpectrum
from .matrices import Matrix
from .scalars import Mode, Scalar

DEFAULT_ZERO_TOL = 1e-9
DEFAULT_CLUSTER_RADIUS = 1e-7


@dataclass(frozen=True)
class Pencil:
    """The pair (F, G) defining the family sF - G."""

    F: Matrix
    G: Matrix

    def __post_init__(self):
        if not (self.F.is_square and self.G.is_square):
            raise ValueError("pencil matrices must be square")
        if self.F.shape != self.G.shape:
            raise ValueError("F and G must have identical dimensions")
        if self.F.mode is not self.G.mode:
            raise ValueError("F and G must share one scalar mode")
        if self.F.rows == 0:
            raise ValueError("empty pencil (n = 0) is not admitted")

    @property
    def n(self) -> int:
        return self.F.rows

    @property
    def mode(self) -> Mode:
        return self.F.mode

    def eval(self, s: Scalar) -> Matrix:
        """The matrix sF - G."""
        return self.F.scale(s) - self.G


@dataclass(frozen=True)
class CharPoly:
    """det(sF - G) with trailing (near-)zero coefficients trimmed.

    ``coefficients`` is ascending in s and empty for the identically zero
    polynomial, in which case p and q are undefined (None).
    """

    coefficients: tuple
    n: int

    @property
    def is_zero(self) -> bool:
        return not self.coefficients

    @property
    def p(self) -> int | None:
        return None if self.is_zero else len(self.coefficients) - 1

    @property
    def q(self) -> int | None:
        return None if self.is_zero else self.n - self.p

    def eval(self, s: Scalar) -> Scalar:
        return linalg.poly_eval(self.coefficients, s)


def char_poly(pencil: Pencil, zero_tol: float | None = None) -> CharPoly:
    """Interpolate det(sF - G) from n + 1 determinant samples."""
    n = pencil.n
    mode = pencil.mode
    if mode is Mode.EXACT:
        nodes = [Fraction(i) for i in range(n + 1)]
    else:
        nodes = [complex(i) for i in range(n + 1)]
    dets = [linalg.det(pencil.eval(s)) for s in nodes]
    vand = Matrix([[s**j for j in range(n + 1)] for s in nodes], mode)
    rhs = Matrix([[d] for d in dets], mode)
    coeffs = linalg.solve_unique(vand, rhs).column_list()
    if mode is Mode.EXACT:
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
    else:
        tol = DEFAULT_ZERO_TOL if zero_tol is None else zero_tol
        thr = tol * max(1.0, max(abs(c) for c in coeffs))
        while coeffs and abs(coeffs[-1]) <= thr:
            coeffs.pop()
    return CharPoly(tuple(coeffs), n)


def is_regular(pencil: Pencil, zero_tol: float | None = None) -> bool:
    """True iff det(sF - G) is not identically zero."""
    return not char_poly(pencil, zero_tol).is_zero


def _divisors(n: int) -> list[int]:
    n = abs(n)
    if n == 0:
        raise ValueError("divisors of zero")
    small, large = [], []
    d = 1
    while d <= math.isqrt(n):
        if n % d == 0:
            small.append(d)
            if d != n // d:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def _rational_roots(coeffs: list[Fraction]) -> tuple[list[tuple[Fraction, int]], list[Fraction]]:
    """All rational roots with multiplicity, plus the unfactored remainder."""
    lcm = 1
    for c in coeffs:
        lcm = lcm * c.denominator // math.gcd(lcm, c.denominator)
    work = [c * lcm for c in coeffs]
    roots: list[tuple[Fraction, int]] = []
    # roots at zero
    t = 0
    while t < len(work) - 1 and work[t] == 0:
        t += 1
    if t:
        roots.append((Fraction(0), t))
        work = work[t:]
    if len(work) <= 1:
        return roots, []
    num_divs = _divisors(int(work[0]))
    den_divs = _divisors(int(work[-1]))
    candidates = sorted(
        {s * Fraction(pn, qd) for pn in num_divs for qd in den_divs for s in (1, -1)},
        key=lambda f: (f.numerator, f.denominator),
    )
    for cand in candidates:
        while len(work) > 1 and linalg.poly_eval(work, cand) == 0:
            # synthetic division by (s - cand)
            out = [Fraction(0)] * (len(work) - 1)
            out[-1] = work[-1]
            for j in range(len(work) - 2, 0, -1):
                out[j - 1] = work[j] + cand * out[j]
            work = out
            found = False
            for i, (r, m) in enumerate(roots):
                if r == cand:
                    roots[i] = (r, m + 1)
                    found = True
                    break
            if not found:
                roots.append((cand, 1))
    remainder = work if len(work) > 1 else []
    return roots, [Fraction(c) for c in remainder]


def _cluster_roots(values: list[complex], radius: float) -> list[tuple[complex, int]]:
    clusters: list[list[complex]] = []
    for v in sorted(values, key=lambda z: (z.real, z.imag)):
        for cl in clusters:
            center = sum(cl) / len(cl)
            if abs(v - center) <= radius:
                cl.append(v)
                break
        else:
            clusters.append([v])
    out = [(sum(cl) / len(cl), len(cl)) for cl in clusters]
    out.sort(key=lambda t: (t[0].real, t[0].imag))
    return out


def finite_eigenvalues(
    cp: CharPoly, cluster_radius: float | None = None
) -> list[tuple[Scalar, int]]:
    """The multiset of finite eigenvalues with algebraic multiplicities.

    Exact mode factors over the rationals and raises UnresolvableSpectrum
    if an irreducible factor of degree >= 2 remains (switch to float mode
    for irrational or complex spectra).  Float mode takes polynomial roots
    and merges any that fall within ``cluster_radius`` of each other.
    """
    if cp.is_zero:
        raise ValueError("characteristic polynomial is identically zero")
    coeffs = list(cp.coefficients)
    if len(coeffs) == 1:
        return []
    if isinstance(coeffs[0], Fraction):
        roots, remainder = _rational_roots(coeffs)
        if remainder:
            raise UnresolvableSpectrum(
                "spectrum has irrational or complex eigenvalues; "
                f"unfactored polynomial of degree {len(remainder) - 1} remains",
                remaining=remainder,
            )
        roots.sort(key=lambda t: (t[0].numerator, t[0].denominator))
        return roots
    import numpy as np

    radius = DEFAULT_CLUSTER_RADIUS if cluster_radius is None else cluster_radius
    values = [complex(z) for z in np.roots([complex(c) for c in reversed(coeffs)])]
    return _cluster_roots(values, radius)
