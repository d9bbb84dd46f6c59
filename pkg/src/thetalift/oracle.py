"""Brute-force finite-quotient oracle.

Functions are tabulated on a window: coordinate i runs over p^lo_i o modulo
p^hi_i o, one representative per cell.  Integrals become finite sums of
roots of unity, computed in double precision with numpy.  Every operation
checks that its integrand is constant on cells (the aliasing guard).
"""

from __future__ import annotations

import cmath
import itertools
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .localfield import (FieldParams, as_fraction, chi_quad, legendre, reduce_mod,
                         unit_part, val_or_inf, valuation)
from .quadspace import GsoElement, XPoint, haar_constant_exponent2, pairing_weights
from .schwartz import (CoordSet, SchwartzFunction, _form_coords, coordinate_window)

INF = float("inf")
TOL = 1e-8
MAX_POINTS = 10 ** 7


class AliasingError(ValueError):
    """The window does not resolve the operation exactly."""


def thread_cap() -> int:
    try:
        return max(1, int(os.environ.get("THETALIFT_THREADS", "1")))
    except ValueError:
        return 1


# ---------------------------------------------------------------------------
# Windows
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FiniteWindow:
    params: FieldParams
    lo: Tuple[int, ...]
    hi: Tuple[int, ...]

    def __post_init__(self):
        if len(self.lo) != len(self.hi) or len(self.lo) not in (4, 8):
            raise ValueError("window must have 4 or 8 axes")
        if any(h < l for l, h in zip(self.lo, self.hi)):
            raise ValueError("window axis with hi < lo")

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def depths(self) -> Tuple[int, ...]:
        return tuple(h - l for l, h in zip(self.lo, self.hi))

    @property
    def shape(self) -> Tuple[int, ...]:
        p = self.params.p
        return tuple(p ** d for d in self.depths)

    @property
    def count(self) -> int:
        return int(np.prod(self.shape))

    @property
    def cell_measure(self) -> float:
        return float(self.params.q) ** (-sum(self.hi))

    def axis_values(self, i: int) -> List[Fraction]:
        step = Fraction(self.params.p) ** self.lo[i]
        return [step * k for k in range(self.params.p ** self.depths[i])]

    def factor(self, k: int) -> "FiniteWindow":
        return FiniteWindow(self.params, self.lo[4 * k:4 * k + 4], self.hi[4 * k:4 * k + 4])

    def with_factor(self, k: int, w: "FiniteWindow") -> "FiniteWindow":
        lo, hi = list(self.lo), list(self.hi)
        lo[4 * k:4 * k + 4] = w.lo
        hi[4 * k:4 * k + 4] = w.hi
        return FiniteWindow(self.params, tuple(lo), tuple(hi))

    def dual(self) -> "FiniteWindow":
        """Window of the Fourier transform of a function tabulated here."""
        p = self.params.p
        blocks = []
        for k in range(self.dim // 4):
            lo, hi = [0] * 4, [0] * 4
            for i, j, w in pairing_weights(self.params):
                vw = valuation(w, p)
                lo[j] = -self.hi[4 * k + i] - vw
                hi[j] = -self.lo[4 * k + i] - vw
            blocks.append((lo, hi))
        return FiniteWindow(self.params, tuple(sum((b[0] for b in blocks), [])),
                            tuple(sum((b[1] for b in blocks), [])))

    @classmethod
    def lattice_pair(cls, params: FieldParams, lo4: Sequence[int], dim: int = 4) -> "FiniteWindow":
        """S(Lambda / Lambda^perp) for the coordinate box Lambda = prod p^lo_i."""
        p = params.p
        perp = [0] * 4
        for i, j, w in pairing_weights(params):
            perp[j] = -lo4[i] - valuation(w, p)
        if any(pj < l for pj, l in zip(perp, lo4)):
            raise ValueError("Lambda^perp is not contained in Lambda")
        for i, j, w in pairing_weights(params):
            if valuation(w, p) + perp[i] + perp[j] < 0:
                raise ValueError("Lambda^perp is not integral")
        lo = tuple(lo4) * (dim // 4)
        hi = tuple(perp) * (dim // 4)
        return cls(params, lo, hi)

    @classmethod
    def covering(cls, f: SchwartzFunction, margin: int = 0) -> "FiniteWindow":
        win = coordinate_window(f)
        return cls(f.params, tuple(l - margin for l, _ in win), tuple(h + margin for _, h in win))

    def union(self, other: "FiniteWindow") -> "FiniteWindow":
        return FiniteWindow(self.params, tuple(min(a, b) for a, b in zip(self.lo, other.lo)),
                            tuple(max(a, b) for a, b in zip(self.hi, other.hi)))

    def to_json(self) -> dict:
        return {"lo": list(self.lo), "hi": list(self.hi), "points": self.count}


# ---------------------------------------------------------------------------
# Constants
# ---------------------------------------------------------------------------


def gauss_sum(p: int) -> complex:
    """tau = sum over units u of (u/p) exp(2 pi i u / p)."""
    return sum(legendre(u, p) * cmath.exp(2j * math.pi * u / p) for u in range(1, p))


@dataclass
class Constants:
    gamma1: complex
    gamma_j: complex
    tau: complex

    @property
    def kprime(self) -> complex:
        return self.tau / math.sqrt(abs(self.tau) ** 2)


def _grid_indices(shape: Tuple[int, ...]) -> List[np.ndarray]:
    return [a.astype(np.int64) for a in np.indices(shape)]


# ---------------------------------------------------------------------------
# Exact modular evaluation of quadratic expressions on a window
# ---------------------------------------------------------------------------


def _quadratic_angle(w: FiniteWindow, monomials: Sequence[Tuple[Fraction, int, int]]) -> Tuple[np.ndarray, int]:
    """Fractional part of sum c * x_a * x_b over the window.

    Returns (numerators, K) with angle = numerators / p^K.  Raises
    AliasingError when a monomial is not constant on window cells.
    """
    p = w.params.p
    terms = []
    for c, a, b in monomials:
        c = as_fraction(c)
        if c == 0:
            continue
        vc = valuation(c, p)
        # value = c p^(lo_a + lo_b) k_a k_b ; shifting k_a by p^depth_a must keep it integral
        e = vc + w.lo[a] + w.lo[b]
        if vc + w.hi[a] + w.lo[b] < 0 or vc + w.lo[a] + w.hi[b] < 0:
            raise AliasingError("quadratic phase is not constant on window cells")
        if e >= 0:
            continue
        terms.append((unit_part(c, p), e, a, b))
    if not terms:
        return np.zeros(w.shape, dtype=np.int64), 0
    K = -min(t[1] for t in terms)
    mod = p ** K
    if mod > 3 * 10 ** 9:
        raise AliasingError("modulus too large for exact int64 evaluation")
    idx = _grid_indices(w.shape)
    acc = np.zeros(w.shape, dtype=np.int64)
    for u, e, a, b in terms:
        r = (u.numerator * pow(u.denominator, -1, mod)) % mod
        r = (r * p ** (e + K)) % mod
        ka = idx[a] % mod
        kb = idx[b] % mod
        acc = (acc + ((r * ka) % mod) * kb) % mod
    return acc, K


def _form_monomials(params: FieldParams, form: str, scale: Fraction) -> List[Tuple[Fraction, int, int]]:
    a, b = _form_coords(form)
    return [(scale * w / 2, b + i, a + j) for i, j, w in pairing_weights(params)]


def psi_of_quadratic(w: FiniteWindow, monomials) -> np.ndarray:
    num, K = _quadratic_angle(w, monomials)
    if K == 0:
        return np.ones(w.shape, dtype=complex)
    return np.exp(2j * np.pi * num / float(w.params.p ** K))


# ---------------------------------------------------------------------------
# Sampling symbolic functions
# ---------------------------------------------------------------------------


def _axis_indicator(params: FieldParams, w: FiniteWindow, i: int, s: CoordSet, twisted: bool) -> np.ndarray:
    vals = w.axis_values(i)
    out = np.zeros(len(vals))
    for k, x in enumerate(vals):
        if s.contains(x, params.p):
            out[k] = chi_quad(params, x) if twisted else 1.0
    return out


def _check_cover(f: SchwartzFunction, w: FiniteWindow) -> None:
    for t in f.terms:
        for i, s in enumerate(t.box):
            if s.kind == "all":
                raise AliasingError("function is not compactly supported")
            if s.kind != "zero" and (s.lower < w.lo[i] or s.period > w.hi[i]):
                raise AliasingError(f"window does not cover coordinate {i}")


def sample(f: SchwartzFunction, w: FiniteWindow, consts: Constants) -> np.ndarray:
    """Complex table of f on the window, formal symbols resolved."""
    if w.dim != f.dim:
        raise ValueError("window dimension mismatch")
    if w.count > MAX_POINTS:
        raise AliasingError("window exceeds the enumeration cap")
    _check_cover(f, w)
    P = f.params
    total = np.zeros(w.shape, dtype=complex)
    for t in f.terms:
        c = t.coeff.evaluate(gamma=consts.gamma1, tau=consts.tau)
        arr = np.ones((), dtype=complex) * c
        for i, s in enumerate(t.box):
            ind = _axis_indicator(P, w, i, s, i in t.twists)
            shape = [1] * w.dim
            shape[i] = len(ind)
            arr = arr * ind.reshape(shape)
        arr = np.broadcast_to(arr, w.shape)
        for fm, m in t.constraints:
            num, K = _quadratic_angle(w, _form_monomials(P, fm, Fraction(P.p) ** (-m)))
            arr = arr * (num == 0)
        total = total + arr
    return total


def total_mass(table: np.ndarray, w: FiniteWindow) -> complex:
    return complex(np.sum(table) * w.cell_measure)


# ---------------------------------------------------------------------------
# Numeric transforms
# ---------------------------------------------------------------------------


def _kernel(p: int, depth: int, unit: Fraction, scale: float) -> np.ndarray:
    mod = p ** depth
    r = (unit.numerator * pow(unit.denominator, -1, mod)) % mod if mod > 1 else 0
    k = np.arange(mod, dtype=np.int64)
    ang = ((r * k[:, None]) % mod) * k[None, :] % mod
    return np.exp(2j * np.pi * ang / mod) * scale


def numeric_fourier(table: np.ndarray, w: FiniteWindow, factor: Optional[int] = None
                    ) -> Tuple[np.ndarray, FiniteWindow]:
    """Finite Fourier sum on one factor (or all); returns the table on the dual window."""
    P = w.params
    p = P.p
    factors = range(w.dim // 4) if factor is None else [factor]
    out = table
    new_w = w
    for k in factors:
        fw = w.factor(k)
        dual = fw.dual()
        base = 4 * k
        arr = out
        haar = float(P.q) ** (haar_constant_exponent2(P) / 2)
        for i, j, wt in pairing_weights(P):
            depth = fw.depths[i]
            kern = _kernel(p, depth, unit_part(wt, p), float(P.q) ** (-fw.hi[i]))
            arr = np.moveaxis(np.tensordot(arr, kern, axes=([base + i], [0])), -1, base + i)
        # axis base+i now carries coordinate j = pi(i); reorder
        perm = list(range(w.dim))
        for i, j, _ in pairing_weights(P):
            perm[base + j] = base + i
        out = np.transpose(arr, perm) * haar
        new_w = new_w.with_factor(k, dual)
    return out, new_w


def numeric_gather(table: np.ndarray, w_in: FiniteWindow, w_out: FiniteWindow,
                   matrix: Sequence[Sequence[Fraction]]) -> np.ndarray:
    """out(x) = table(M x) for a rational matrix M, zero when M x leaves the support box."""
    p = w_in.params.p
    n = w_in.dim
    idx = _grid_indices(w_out.shape)
    inside = np.ones(w_out.shape, dtype=bool)
    coords = []
    for i in range(n):
        cs = []
        for j in range(n):
            m = as_fraction(matrix[i][j])
            if m == 0:
                continue
            c = m * Fraction(p) ** (w_out.lo[j] - w_in.lo[i])
            if valuation(c, p) + w_out.depths[j] < w_in.depths[i]:
                raise AliasingError("substitution is not constant on output cells")
            cs.append((c, j))
        if not cs:
            coords.append(np.zeros(w_out.shape, dtype=np.int64))
            continue
        e = min(0, min(valuation(c, p) for c, _ in cs))
        D = w_in.depths[i] - e
        mod = p ** D
        if mod > 3 * 10 ** 9:
            raise AliasingError("modulus too large")
        acc = np.zeros(w_out.shape, dtype=np.int64)
        for c, j in cs:
            cc = c * Fraction(p) ** (-e)
            r = (cc.numerator * pow(cc.denominator, -1, mod)) % mod
            acc = (acc + (r * (idx[j] % mod)) % mod) % mod
        if e < 0:
            inside &= (acc % (p ** (-e))) == 0
            acc = acc // (p ** (-e))
        coords.append(acc % (p ** w_in.depths[i]))
    vals = table[tuple(coords)]
    return np.where(inside, vals, 0)


def numeric_scale(table: np.ndarray, w: FiniteWindow, a, factor: Optional[int] = None
                  ) -> Tuple[np.ndarray, FiniteWindow]:
    """x -> f(a x) on one factor (or all), no character factors."""
    a = as_fraction(a)
    p = w.params.p
    v = valuation(a, p)
    axes = range(w.dim) if factor is None else range(4 * factor, 4 * factor + 4)
    lo, hi = list(w.lo), list(w.hi)
    for i in axes:
        lo[i] -= v
        hi[i] -= v
    w_out = FiniteWindow(w.params, tuple(lo), tuple(hi))
    mat = [[(a if i in axes else 1) if i == j else 0 for j in range(w.dim)] for i in range(w.dim)]
    return numeric_gather(table, w, w_out, mat), w_out


def numeric_multiplier(table: np.ndarray, w: FiniteWindow, b1, b2, b3) -> np.ndarray:
    P = w.params
    mon = []
    for b, fm in ((b1, "xx"), (b2, "xy"), (b3, "yy")):
        b = as_fraction(b)
        if b:
            mon += _form_monomials(P, fm, b * (2 if fm == "xy" else 1))
    return table * psi_of_quadratic(w, mon)


def _x_matrix(h: GsoElement) -> List[List[Fraction]]:
    """Matrix of x -> h x in canonical coordinates (column j = image of e_j)."""
    P = h.params
    cols = []
    for j in range(4):
        e = XPoint.of(P, *[1 if k == j else 0 for k in range(4)])
        cols.append(h.apply(e).coords)
    return [[cols[j][i] for j in range(4)] for i in range(4)]


def numeric_gso(table: np.ndarray, w: FiniteWindow, h: GsoElement) -> Tuple[np.ndarray, FiniteWindow]:
    """phi(h^-1 x, h^-1 y), tabulated on the image window."""
    hinv = _x_matrix(h.inverse())
    lam = h.similitude
    # image of the support box under h: use a window wide enough for all coordinates
    hm = _x_matrix(h)
    p = w.params.p
    lo, hi = list(w.lo), list(w.hi)
    for base in range(0, w.dim, 4):
        for i in range(4):
            lows = [val_or_inf(hm[i][j], p) + w.lo[base + j] for j in range(4) if hm[i][j] != 0]
            lo[base + i] = int(min(lows))
            need = [w.hi[base + j] - val_or_inf(hinv[j][i], p) for j in range(4) if hinv[j][i] != 0]
            hi[base + i] = int(max(max(need), lo[base + i]))
    w_out = FiniteWindow(w.params, tuple(lo), tuple(hi))
    mat = [[Fraction(0)] * w.dim for _ in range(w.dim)]
    for base in range(0, w.dim, 4):
        for i in range(4):
            for j in range(4):
                mat[base + i][base + j] = hinv[i][j]
    return numeric_gather(table, w, w_out, mat), w_out


# ---------------------------------------------------------------------------
# Weil representation on tables
# ---------------------------------------------------------------------------


def _abs(p: int, x: Fraction, power: int) -> float:
    return float(p) ** (-power * valuation(x, p))


def numeric_levi(table, w, a):
    (a1, a2), (a3, a4) = [[as_fraction(x) for x in row] for row in a]
    P = w.params
    det = a1 * a4 - a2 * a3
    if w.factor(0) != w.factor(1):
        raise AliasingError("Levi action needs equal factor windows")
    I = [[Fraction(int(i == j)) for j in range(4)] for i in range(4)]
    mat = [[Fraction(0)] * 8 for _ in range(8)]
    for i in range(4):
        mat[i][i] = a1
        mat[i][4 + i] = a3
        mat[4 + i][i] = a2
        mat[4 + i][4 + i] = a4
    return numeric_gather(table, w, w, mat) * chi_quad(P, det) * _abs(P.p, det, 2), w


def numeric_weyl_j(table, w, consts: Constants):
    out, w2 = numeric_fourier(table, w)
    return out * consts.gamma_j, w2


def numeric_sl2(table, w, factor, g, consts: Constants):
    (a, b), (c, d) = [[as_fraction(x) for x in row] for row in g]
    P = w.params

    def n_of(t, ww, x):
        if x == 0:
            return t, ww
        bs = (x, 0, 0) if factor == 0 else (0, 0, x)
        return numeric_multiplier(t, ww, *bs), ww

    def diag(t, ww, x):
        t2, w2 = numeric_scale(t, ww, x, factor)
        return t2 * chi_quad(P, x) * _abs(P.p, x, 2), w2

    def weyl(t, ww):
        t2, w2 = numeric_fourier(t, ww, factor)
        return t2 * consts.gamma1, w2

    if c == 0:
        t, ww = n_of(table, w, b / a)
        return diag(t, ww, a)
    t, ww = n_of(table, w, d / c)
    t, ww = diag(t, ww, -c)
    t, ww = weyl(t, ww)
    return n_of(t, ww, a / c)


def _m2inv(x):
    d = x[0][0] * x[1][1] - x[0][1] * x[1][0]
    return ((x[1][1] / d, -x[0][1] / d), (-x[1][0] / d, x[0][0] / d))


def _m2mul(x, y):
    return tuple(tuple(sum(x[i][k] * y[k][j] for k in range(2)) for j in range(2)) for i in range(2))


def _unit_det(m, p) -> bool:
    d = m[0][0] * m[1][1] - m[0][1] * m[1][0]
    return d != 0 and valuation(d, p) == 0


def numeric_weil(g, h: Optional[GsoElement], table: np.ndarray, w: FiniteWindow,
                 consts: Constants) -> Tuple[np.ndarray, FiniteWindow]:
    """omega(g, h) applied to a table, by the same generator formulas."""
    from .gsp4cosets import similitude_diag
    P = w.params
    lam = g.lam
    if lam != 1:
        if h is None or h.similitude != lam:
            raise ValueError("a companion with matching similitude is required")
        t, ww = numeric_gso(table, w, h)
        t = t * _abs(P.p, lam, -2)
        return _numeric_sp4(g @ similitude_diag(1 / lam), t, ww, consts)
    if h is not None:
        table, w = numeric_gso(table, w, h)
    return _numeric_sp4(g, table, w, consts)


def _numeric_sp4(g, table, w, consts):
    from .gsp4cosets import unipotent, weyl_j
    from .weilrep import _iota_parts
    P = w.params
    p = P.p
    r = g.rows
    A = ((r[0][0], r[0][1]), (r[1][0], r[1][1]))
    B = ((r[0][2], r[0][3]), (r[1][2], r[1][3]))
    C = ((r[2][0], r[2][1]), (r[3][0], r[3][1]))
    D = ((r[2][2], r[2][3]), (r[3][2], r[3][3]))
    zero = lambda m: all(x == 0 for row in m for x in row)
    ident = lambda m: m[0][0] == 1 and m[1][1] == 1 and m[0][1] == 0 and m[1][0] == 0
    if g.is_identity():
        return table, w
    if zero(B) and zero(C):
        return numeric_levi(table, w, A)
    if ident(A) and ident(D) and zero(C):
        return numeric_multiplier(table, w, B[0][0], B[0][1], B[1][1]), w
    parts = _iota_parts(g)
    if parts is not None:
        t, ww = numeric_sl2(table, w, 1, parts[1], consts)
        return numeric_sl2(t, ww, 0, parts[0], consts)
    if zero(A) and zero(D) and ident(B) and C == ((-1, 0), (0, -1)):
        return numeric_weyl_j(table, w, consts)
    if _unit_det(C, p):
        # g = n(A C^-1) J m(-C) n(C^-1 D)
        cinv = _m2inv(C)
        x = _m2mul(A, cinv)
        y = _m2mul(cinv, D)
        t = numeric_multiplier(table, w, y[0][0], y[0][1], y[1][1])
        t, ww = numeric_levi(t, w, tuple(tuple(-v for v in row) for row in C))
        t, ww = numeric_weyl_j(t, ww, consts)
        return numeric_multiplier(t, ww, x[0][0], x[0][1], x[1][1]), ww
    # omega(g) = omega(g n(t) J) omega(J)^-1 omega(n(-t)) with C t + D invertible
    for t1, t2, t3 in itertools.product(range(p), repeat=3):
        ct = _m2mul(C, ((t1, t2), (t2, t3)))
        m = tuple(tuple(ct[i][j] + D[i][j] for j in range(2)) for i in range(2))
        if _unit_det(m, p):
            break
    else:
        raise AliasingError("no symmetric shift makes the lower block invertible")
    t = numeric_multiplier(table, w, -t1, -t2, -t3)
    # omega(J)^-1 = omega(m(-1)) omega(J)
    t, ww = numeric_weyl_j(t, w, consts)
    t, ww = numeric_levi(t, ww, ((-1, 0), (0, -1)))
    return _numeric_sp4(g @ unipotent(t1, t2, t3) @ weyl_j(), t, ww, consts)


# ---------------------------------------------------------------------------
# Gauss integrals and constants
# ---------------------------------------------------------------------------


def numeric_gauss(params: FieldParams, kind: str, m: int, twisted: bool, c) -> complex:
    """Riemann sum for the integral over Ideal(m) or Shell(m) of [chi(y)] psi(c y)."""
    p = params.p
    c = as_fraction(c)
    if kind == "shell":
        return _numeric_shell(params, m, twisted, c)
    if not twisted:
        if c == 0:
            return float(p) ** (-m)
        D = max(0, -(valuation(c, p) + m))
        if D == 0:
            return float(p) ** (-m)
        mod = p ** D
        u = unit_part(c, p)
        r = (u.numerator * pow(u.denominator, -1, mod)) % mod
        k = np.arange(mod, dtype=np.int64)
        return complex(np.sum(np.exp(2j * np.pi * ((r * k) % mod) / mod))) * float(p) ** (-m) / mod
    # twisted ideal: shells m .. S by summation, deeper shells analytically
    vc = INF if c == 0 else valuation(c, p)
    top = m + 2 if vc == INF else max(m, int(-vc)) + 1
    total = sum(_numeric_shell(params, k, True, c) for k in range(m, top + 1))
    # beyond top, psi(c y) = 1 on every shell: the shell integral is the chi-mass
    if params.kind == "ramified":
        return total
    if params.kind == "split":
        return total + float(p) ** (-(top + 1))
    tail = (-1) ** ((top + 1) % 2) * float(p) ** (-(top + 1)) * (p - 1) / (p + 1)
    return total + tail


def _numeric_shell(params: FieldParams, m: int, twisted: bool, c: Fraction) -> complex:
    p = params.p
    vc = INF if c == 0 else valuation(c, p)
    D = 1 if vc == INF else max(1, int(-(vc + m)))
    mod = p ** D
    k = np.arange(mod, dtype=np.int64)
    units = k[k % p != 0]
    if c == 0:
        ang = np.zeros(len(units))
    else:
        # psi(c p^m v) with c p^m = u p^-D' ; reduce exactly
        cm = c * Fraction(p) ** m
        if valuation(cm, p) >= 0:
            ang = np.zeros(len(units))
        else:
            u = unit_part(cm, p)
            Dp = -valuation(cm, p)
            modp = p ** Dp
            r = (u.numerator * pow(u.denominator, -1, modp)) % modp
            ang = ((r * (units % modp)) % modp) / modp
    vals = np.exp(2j * np.pi * ang)
    if twisted:
        if params.kind == "ramified":
            chi_units = np.array([0] + [legendre(r, p) for r in range(1, p)])[units % p]
        else:
            chi_units = np.ones(len(units), dtype=np.int64)
        if params.kind == "inert" and m % 2:
            chi_units = -chi_units
        if params.kind == "ramified" and m % 2:
            chi_units = chi_units * params.chi_pi
        vals = vals * chi_units
    return complex(np.sum(vals)) * float(p) ** (-m) / mod


def resolve_gamma1(params: FieldParams, lo4: Optional[Sequence[int]] = None, seed: int = 0) -> complex:
    """gamma_1 from (w n(1))^3 = 1: (F1 M1)^3 acts as the scalar gamma_1."""
    w = FiniteWindow.lattice_pair(params, lo4 or default_lattice(params))
    rng = np.random.default_rng(seed)
    v = rng.normal(size=w.shape) + 1j * rng.normal(size=w.shape)
    mult = psi_of_quadratic(w, _form_monomials(params, "xx", Fraction(1)))
    t = v
    for _ in range(3):
        t = t * mult
        t, _w = numeric_fourier(t, w)
    ratio = t / v
    lam = complex(np.mean(ratio))
    if np.max(np.abs(ratio - lam)) > 1e-8:
        raise AliasingError("(F M)^3 is not scalar on this window")
    return lam


def resolve_gamma_j(params: FieldParams, lo4: Optional[Sequence[int]] = None, seed: int = 1) -> complex:
    """gamma(X) from (J n(1_2))^3 = 1 on S(X^2)."""
    w = FiniteWindow.lattice_pair(params, lo4 or small_lattice(params), dim=8)
    rng = np.random.default_rng(seed)
    v = rng.normal(size=w.shape) + 1j * rng.normal(size=w.shape)
    t = v
    for _ in range(3):
        t = numeric_multiplier(t, w, 1, 0, 1)
        t, _w = numeric_fourier(t, w)
    ratio = t / v
    lam = complex(np.mean(ratio))
    if np.max(np.abs(ratio - lam)) > 1e-8:
        raise AliasingError("(F M)^3 is not scalar on this window")
    return lam


def default_lattice(params: FieldParams) -> Tuple[int, ...]:
    """A lattice Lambda with integral Lambda^perp and a non-trivial quotient."""
    if params.kind == "split":
        return (-1, 0, -1, 0)
    if params.kind == "inert":
        return (-1, 0, -1, 0)
    return (-1, -1, -1, -1)


def small_lattice(params: FieldParams) -> Tuple[int, ...]:
    """A smaller lattice for X^2 tables."""
    if params.kind == "ramified":
        return (0, -1, -1, 0)
    return (-1, 0, 0, 0)


def resolve_constants(params: FieldParams, seed: int = 0) -> Constants:
    tau = gauss_sum(params.p)
    if abs(tau * tau - legendre(-1, params.p) * params.p) > 1e-9:
        raise ArithmeticError("tau^2 = chi(-1) q violated")
    g1 = resolve_gamma1(params, seed=seed)
    gj = resolve_gamma_j(params, seed=seed + 1)
    for g in (g1, gj):
        if abs(abs(g) - 1) > 1e-9 or abs(g ** 4 - 1) > 1e-9:
            raise ArithmeticError("Weil index is not a fourth root of unity")
    return Constants(_snap(g1), _snap(gj), tau)


def _snap(z: complex) -> complex:
    """Round a numeric fourth root of unity to the exact one."""
    for c in (1, 1j, -1, -1j):
        if abs(z - c) < 1e-8:
            return complex(c)
    return z


# ---------------------------------------------------------------------------
# Cross-checks
# ---------------------------------------------------------------------------


def crosscheck(symbolic: SchwartzFunction, numeric: np.ndarray, w: FiniteWindow,
               consts: Constants) -> float:
    """Maximal deviation between a symbolic function and a numeric table."""
    s = sample(symbolic, w, consts)
    return float(np.max(np.abs(s - numeric))) if s.size else 0.0


def resample(table: np.ndarray, w_from: FiniteWindow, w_to: FiniteWindow) -> np.ndarray:
    ident = [[Fraction(int(i == j)) for j in range(w_from.dim)] for i in range(w_from.dim)]
    return numeric_gather(table, w_from, w_to, ident)


@dataclass
class RepresentationReport:
    words: int
    max_deviation: float
    samples: List[Tuple[str, float]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.words > 0 and self.max_deviation < TOL

    def to_json(self) -> dict:
        return {"words": self.words, "max_deviation": f"{self.max_deviation:.3e}",
                "pass": self.ok}


def _random_generator(rng, p: int):
    from .gsp4cosets import levi, lower_unipotent, s2, unipotent, weyl_j
    k = rng.randrange(5)
    if k == 0:
        return "J", weyl_j()
    if k == 1:
        return "s2", s2()
    if k == 2:
        b = tuple(rng.randrange(p) for _ in range(3))
        return f"n{b}", unipotent(*b)
    if k == 3:
        b = tuple(rng.randrange(p) for _ in range(3))
        return f"nbar{b}", lower_unipotent(*b)
    while True:
        a = [[rng.randrange(p) for _ in range(2)] for _ in range(2)]
        if (a[0][0] * a[1][1] - a[0][1] * a[1][0]) % p:
            return f"m{a}", levi(a)


def representation_check(params: FieldParams, words: int = 100, seed: int = 0,
                         consts: Optional[Constants] = None) -> RepresentationReport:
    """omega(g1) ... omega(gk) against omega(g1 ... gk) on random words of length <= 3."""
    import random
    from .gsp4cosets import identity
    consts = consts or resolve_constants(params, seed=seed)
    w = FiniteWindow.lattice_pair(params, small_lattice(params), dim=8)
    rng = random.Random(seed)
    v = np.random.default_rng(seed).normal(size=w.shape) + 0j
    worst = 0.0
    samples = []
    for _ in range(words):
        word = [_random_generator(rng, params.p) for _ in range(rng.randint(1, 3))]
        t, tw = v, w
        for _name, g in reversed(word):
            t, tw = numeric_weil(g, None, t, tw, consts)
        prod = identity()
        for _name, g in word:
            prod = prod @ g
        u, uw = numeric_weil(prod, None, v, w, consts)
        common = tw.union(uw)
        d = float(np.max(np.abs(resample(t, tw, common) - resample(u, uw, common))))
        worst = max(worst, d)
        samples.append(("*".join(n for n, _ in word), d))
    return RepresentationReport(words, worst, samples)
