"""The triangular partition function Z_m by five independent routes.

Z_m is the half-quadrant six-vertex partition function with boundary
vertices on the diagonal, bulk argument x_i x_j at the crossing of lines
i and j, and all external edges empty.  Routes:

  z_enumerate         direct depth-first enumeration (trusted oracle, m <= cap)
  z_pfaffian          prefactor * Pf((x_i-x_j)/(1-x_i x_j) Q(x_i, x_j))
  z_subset_kuperberg  even-subset sum over Kuperberg Pfaffians
  z_shuffle           shuffle powers of the closed forms Z_1, Z_2
  z_altform           even/odd Pfaffian pair (or its subset form) with a
                      generating parameter u; u = 1 recovers Z_m

Closed forms at small size:
  Z_0 = 1,  Z_1 = 1 - h(x_1),
  Z_2 = (1-h(x_1))(1-h(x_2)) - h(x_1)h(x_2)/(ac) * (1-q)x_1x_2/(1-q x_1x_2).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import factorial

from .errors import CapExceeded, DegeneratePoint
from .pfaffian import pfaffian
from .shuffle import DEFAULT_ARITY_CAP, SymFun, shuffle_power, shuffle_product
from .weights import STOCHASTIC, ModelParams, boundary_weight, bulk_entries, h_func, h_over_ac

ENUM_CAP = 7


@dataclass
class TriangularSpec:
    """Evaluation request: alphabet, model parameters, and the generating
    parameter u of the alternative form (u = 1 recovers Z_m)."""

    x: tuple
    params: ModelParams
    u: object = 1

    def __post_init__(self):
        self.x = tuple(self.x)

    @property
    def m(self) -> int:
        return len(self.x)


# ---------------------------------------------------------------------------
# Kernels
# ---------------------------------------------------------------------------


def kernel_S(xi, xj):
    den = 1 - xi * xj
    if den == 0:
        raise DegeneratePoint("1 - x_i x_j vanished in S")
    return (xi - xj) / den


def kernel_M(xi, xj, q):
    """Kuperberg kernel (1-q)(x_i-x_j)/((1-x_i x_j)(1-q x_i x_j))."""
    den = (1 - xi * xj) * (1 - q * xi * xj)
    if den == 0:
        raise DegeneratePoint("Kuperberg kernel denominator vanished")
    return (1 - q) * (xi - xj) / den


def kernel_Q(xi, xj, params: ModelParams):
    """Symmetric kernel of the single-Pfaffian formula."""
    q = params.q
    den = 1 - q * xi * xj
    if den == 0:
        raise DegeneratePoint("1 - q x_i x_j vanished in Q")
    pair = h_func(xi, params) * h_over_ac(xj, params)
    return (1 - h_func(xi, params)) * (1 - h_func(xj, params)) - pair * (
        1 - q
    ) * xi * xj / den


def kernel_Qe(xi, xj, params: ModelParams, u):
    """Even kernel of the alternative form (q^(1/2) factors cancel)."""
    q = params.q
    den = 1 - q * xi * xj
    if den == 0:
        raise DegeneratePoint("1 - q x_i x_j vanished in Q^e")
    pair = h_func(xi, params) * h_over_ac(xj, params)
    return kernel_S(xi, xj) + u * u * q * xi * xj * pair * (xi - xj) / den


def kernel_Qo(xi, xj, params: ModelParams, u):
    """Odd kernel of the alternative form."""
    q = params.q
    den = 1 - q * xi * xj
    if den == 0:
        raise DegeneratePoint("1 - q x_i x_j vanished in Q^o")
    pair = h_func(xi, params) * h_over_ac(xj, params)
    return xi * xj * kernel_S(xi, xj) + u * u * pair * (xi - xj) / den


# ---------------------------------------------------------------------------
# Route 1: direct enumeration (the oracle)
# ---------------------------------------------------------------------------


def z_enumerate(spec: TriangularSpec, cap: int = ENUM_CAP):
    """Depth-first enumeration of all path configurations of the triangle.

    Column i rises through rows 1..i-1 (weights at z = x_i x_j), reflects
    at its boundary vertex, and runs right; afterwards every horizontal
    edge must be empty.
    """
    xs, params = spec.x, spec.params
    m = len(xs)
    if m > cap:
        raise CapExceeded(f"enumeration size {m} exceeds cap {cap}")
    q = params.q
    total = [0]

    def column(i, hs, weight):
        # climb column i through existing rows, then turn at the K vertex
        def climb(j, v, hs, w):
            if j == i:
                for h_new in (0, 1):
                    kw = boundary_weight(v, h_new, xs[i - 1], params)
                    if kw == 0:
                        continue
                    nxt = hs + (h_new,)
                    if i == m:
                        if all(h == 0 for h in nxt):
                            total[0] = total[0] + w * kw
                    else:
                        column(i + 1, nxt, w * kw)
                return
            z = xs[i - 1] * xs[j - 1]
            for (v2, h2), fn in bulk_entries(v, hs[j - 1], STOCHASTIC):
                wt = fn(z, q)
                if wt == 0:
                    continue
                climb(j + 1, v2, hs[: j - 1] + (h2,) + hs[j:], w * wt)

        climb(1, 0, hs, weight)

    if m == 0:
        return 1
    column(1, (), 1)
    return total[0]


# ---------------------------------------------------------------------------
# Route 2: single Pfaffian
# ---------------------------------------------------------------------------


def _check_distinct(xs):
    n = len(xs)
    for i in range(n):
        for j in range(i + 1, n):
            if xs[i] == xs[j]:
                raise DegeneratePoint(f"coinciding alphabet entries x={xs[i]}")
            if 1 - xs[i] * xs[j] == 0:
                raise DegeneratePoint("x_i x_j = 1 in prefactor")


def z_pfaffian(spec: TriangularSpec):
    """Prefactor times Pf((x_i-x_j)/(1-x_i x_j) * Q(x_i, x_j)).

    Odd sizes follow the convention Z_{2l-1}(x) = Z_{2l}(x, 1); the
    appended point must keep the prefactor non-degenerate.
    """
    xs, params = spec.x, spec.params
    if len(xs) == 0:
        return 1
    one = Fraction(1) if isinstance(params.q, (Fraction, int)) else 1.0
    if len(xs) % 2 == 1:
        xs = xs + (one,)
    _check_distinct(xs)
    n = len(xs)
    pref = 1
    M = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            s = kernel_S(xs[i], xs[j])
            M[i][j] = s * kernel_Q(xs[i], xs[j], params)
            if i < j:
                pref = pref / s
    return pref * pfaffian(M, validate=False)


# ---------------------------------------------------------------------------
# Route 3: subset sum over Kuperberg Pfaffians
# ---------------------------------------------------------------------------


def z_kuperberg(xs, q):
    """Z^K_m: the partition function at the off-diagonal boundary point
    a = 1, c = -1, as a single Pfaffian; vanishes for odd m."""
    m = len(xs)
    if m % 2 == 1:
        return 0
    if m == 0:
        return 1
    _check_distinct(xs)
    pref = 1
    M = [[0] * m for _ in range(m)]
    for i in range(m):
        for j in range(m):
            if i != j:
                M[i][j] = kernel_M(xs[i], xs[j], q)
            if i < j:
                pref = pref * (1 - xs[i] * xs[j]) / (xs[i] - xs[j])
    for x in xs:
        pref = pref * x
    return pref * pfaffian(M, validate=False)


def z_subset_kuperberg(spec: TriangularSpec):
    """Even-subset expansion with general boundary weights.

    With the c -> infinity table only the empty subset survives and the
    function factorises to prod x_i (1 - a x_i)/(x_i - a).
    """
    xs, params = spec.x, spec.params
    m = len(xs)
    hs = [h_func(x, params) for x in xs]
    H = 1
    for h in hs:
        H = H * (1 - h)
    if params.c_infinite:
        return H
    _check_distinct(xs)
    for h in hs:
        if h == 1:
            raise DegeneratePoint("h(x_i) = 1 makes the subset weights singular")
    q = params.q
    inv_ac = -1 / (params.a * params.c)
    total = 0
    idx = range(m)
    for r in range(0, m // 2 + 1):
        for S in combinations(idx, 2 * r):
            comp = [i for i in idx if i not in S]
            term = inv_ac**r if r else 1
            for i in S:
                term = term * hs[i] / (1 - hs[i])
                for j in comp:
                    den = xs[i] - xs[j]
                    term = term * (1 - xs[i] * xs[j]) / den
            term = term * z_kuperberg([xs[i] for i in S], q)
            total = total + term
    return H * total


# ---------------------------------------------------------------------------
# Route 4: shuffle powers of Z_1, Z_2
# ---------------------------------------------------------------------------


def z1_symfun(params: ModelParams) -> SymFun:
    return SymFun(1, lambda a: 1 - h_func(a[0], params), name="Z1")


def z2_symfun(params: ModelParams) -> SymFun:
    def ev(args):
        x1, x2 = args
        den = 1 - params.q * x1 * x2
        if den == 0:
            raise DegeneratePoint("1 - q x_1 x_2 vanished in Z_2")
        pair = h_func(x1, params) * h_over_ac(x2, params)
        return (1 - h_func(x1, params)) * (1 - h_func(x2, params)) - pair * (
            1 - params.q
        ) * x1 * x2 / den

    return SymFun(2, ev, name="Z2")


def z_shuffle(spec: TriangularSpec, cap: int = DEFAULT_ARITY_CAP):
    """Z_{2m} = Z_2^{*m}/m!,  Z_{2m+1} = Z_1 * Z_2^{*m}/m!."""
    xs, params = spec.x, spec.params
    m = len(xs)
    if m > cap:
        raise CapExceeded(f"shuffle size {m} exceeds cap {cap}")
    if m == 0:
        return 1
    half = m // 2
    f = shuffle_power(z2_symfun(params), half, cap=cap)
    if m % 2 == 1:
        f = shuffle_product(z1_symfun(params), f, cap=cap)
    return f(xs) / factorial(half)


# ---------------------------------------------------------------------------
# Route 5: alternative (even/odd Pfaffian) form with generating parameter u
# ---------------------------------------------------------------------------


def _pref_inv_s(xs):
    pref = 1
    for i in range(len(xs)):
        for j in range(i + 1, len(xs)):
            pref = pref / kernel_S(xs[i], xs[j])
    return pref


def _z_even_pf(xs, params, u):
    """Z^e on an even alphabet."""
    n = len(xs)
    M = [
        [0 if i == j else kernel_Qe(xs[i], xs[j], params, u) for j in range(n)]
        for i in range(n)
    ]
    return _pref_inv_s(xs) * pfaffian(M, validate=False)


def _z_odd_pf(xs, params, u):
    """Z^o on an odd alphabet: bordered Pfaffian with +-u h(x) edges."""
    n = len(xs)
    hs = [h_func(x, params) for x in xs]
    M = [[0] * (n + 1) for _ in range(n + 1)]
    for i in range(n):
        for j in range(n):
            if i != j:
                M[i][j] = kernel_Qo(xs[i], xs[j], params, u)
        M[i][n] = -u * hs[i]
        M[n][i] = u * hs[i]
    return _pref_inv_s(xs) * pfaffian(M, validate=False)


def z_altform(spec: TriangularSpec, route: str = "pfaffian"):
    """Z_m(u; x) = Z^e_m + Z^o_m; at u = 1 this is Z_m.

    route 'pfaffian' evaluates the even/odd Pfaffian pair (parities off by
    one are crossed through the value 1); route 'subset' evaluates the
    explicit sum over subsets S with weights g_S.  Finite c only.
    """
    xs, params, u = spec.x, spec.params, spec.u
    if params.c_infinite:
        raise DegeneratePoint("alternative form is implemented for finite c")
    m = len(xs)
    if m == 0:
        return 1
    one = Fraction(1) if isinstance(params.q, (Fraction, int)) else 1.0
    if route == "subset":
        return _z_altform_subset(xs, params, u)
    if route != "pfaffian":
        raise ValueError(f"unknown route {route!r}")
    _check_distinct(xs + (one,))
    if m % 2 == 0:
        ze = _z_even_pf(xs, params, u)
        zo = _z_odd_pf(xs + (one,), params, u)  # Z^o_m := Z^o_{m+1}(x, 1)
    else:
        ze = _z_even_pf(xs + (one,), params, u)  # Z^e_m := Z^e_{m+1}(x, 1)
        zo = _z_odd_pf(xs, params, u)
    return ze + zo


def _z_altform_subset(xs, params, u):
    m = len(xs)
    q = params.q
    hs = [h_func(x, params) for x in xs]
    hoa = [h_over_ac(x, params) for x in xs]
    total = 0
    idx = range(m)
    for size in range(m + 1):
        for S in combinations(idx, size):
            comp = [i for i in idx if i not in S]
            r = size // 2
            term = (-u) ** size * q ** (r * r) if size else 1
            # q^(r^2)/(ac)^r * prod h(x_i) realised through h/(ac) pairs
            pick = list(S)
            for t in range(r):
                term = term * hs[pick[2 * t]] * hoa[pick[2 * t + 1]]
            if size % 2 == 1:
                term = term * hs[pick[-1]]
            if size % 2 == 0:
                for i in S:
                    term = term * xs[i]
            else:
                for i in comp:
                    term = term * xs[i]
            for i in S:
                for j in comp:
                    den = xs[i] - xs[j]
                    if den == 0:
                        raise DegeneratePoint("coinciding alphabet entries")
                    term = term * (xs[i] * xs[j] - 1) / den
            for ai, i in enumerate(S):
                for j in S[ai + 1 :]:
                    den = 1 - q * xs[i] * xs[j]
                    if den == 0:
                        raise DegeneratePoint("1 - q x_i x_j vanished")
                    term = term * (1 - xs[i] * xs[j]) / den
            total = total + term
    return total


# ---------------------------------------------------------------------------
# Property suite
# ---------------------------------------------------------------------------


def z_tilde(xs, params: ModelParams, z_route=z_enumerate):
    """Polynomial numerator: prod (a-x_i)(c-x_i) prod (1-q x_i x_j) * Z_m."""
    val = z_route(TriangularSpec(xs, params))
    for x in xs:
        val = val * (params.a - x) * (params.c - x)
    for i in range(len(xs)):
        for j in range(i + 1, len(xs)):
            val = val * (1 - params.q * xs[i] * xs[j])
    return val


def _lagrange_eval(points, values, at):
    """Value at `at` of the interpolating polynomial through the points."""
    total = 0
    for i, (xi, yi) in enumerate(zip(points, values)):
        term = yi
        for j, xj in enumerate(points):
            if i != j:
                term = term * (at - xj) / (xi - xj)
        total = total + term
    return total


def verify_z_properties(spec: TriangularSpec, rng=None) -> dict:
    """Property report for Z_m: symmetry, the four boundary recursions, the
    numerator freezing relation at x_i = 1/(q x_j), and the degree bound.

    Each entry is (ok, residual-or-note); all checks are exact in the
    rational backend.
    """
    import itertools as it
    import random

    xs, params = spec.x, spec.params
    m = len(xs)
    rng = rng or random.Random(11)
    q = params.q
    report = {}

    z = lambda alph: z_enumerate(TriangularSpec(alph, params))
    base = z(xs)

    perms = list(it.permutations(xs)) if m <= 3 else [xs, tuple(reversed(xs))]
    sym_ok = all(z(p) == base for p in perms)
    report["symmetry"] = (sym_ok, 0.0)

    at_zero = z((0 * q,) + xs[1:])
    report["x_to_zero"] = (at_zero == 0, float(abs(at_zero)))

    one = Fraction(1) if isinstance(q, (Fraction, int)) else 1.0
    ok_pm = True
    for s in (one, -one):
        lhs = z((s,) + xs[1:])
        rhs = z(xs[1:])
        ok_pm = ok_pm and lhs == rhs
    report["x_to_one"] = (ok_pm, 0.0)

    if m >= 2:
        lhs = z((1 / xs[1],) + xs[1:])
        rhs = z(xs[2:])
        report["x_to_reciprocal"] = (lhs == rhs, float(abs(lhs - rhs)))
    else:
        report["x_to_reciprocal"] = (True, 0.0)

    if m >= 2:
        report["freeze_at_q_reciprocal"] = _check_recur3(xs, params, rng)
    else:
        report["freeze_at_q_reciprocal"] = (True, 0.0)

    report["degree_bound"] = _check_degree(xs, params, rng)
    return report


def _sample_points(rng, avoid, count):
    """Distinct random rationals avoiding the degeneracies in `avoid`."""
    import random

    pts = []
    while len(pts) < count:
        v = Fraction(rng.randint(-60, 60), rng.randint(1, 40))
        if v in pts or any(bad(v) for bad in avoid):
            continue
        pts.append(v)
    return pts


def _avoiders(others, params):
    q, a, c = params.q, params.a, params.c
    def bad(v):
        if v == 0 or v == 1 or v == -1 or v == a or v == c:
            return True
        for o in others:
            if v == o or v * o == 1 or (q != 0 and q * v * o == 1):
                return True
        return False
    return [bad]


def _check_recur3(xs, params, rng):
    """recur3: the numerator freezes at x_i = 1/(q x_j).

    Z~ is a polynomial in x_1, so its value at the freezing point is read
    off an exact Lagrange interpolation through m+2 generic points.
    """
    m = len(xs)
    q = params.q
    xj = xs[1]
    if q == 0 or xj == 0:
        return (False, "q or x_j zero")
    target = 1 / (q * xj)
    others = list(xs[1:])
    pts = _sample_points(rng, _avoiders(others, params), m + 2)
    vals = [z_tilde((p,) + tuple(others), params) for p in pts]
    lhs = _lagrange_eval(pts, vals, target)

    rest = tuple(others[1:])
    rhs = -params.a * params.c * (1 - q) * q ** (m - 3)
    rhs = rhs * (1 - xj**2) * (1 - 1 / (q**2 * xj**2))
    for xk in rest:
        rhs = rhs * (1 - xk / (q * xj)) * (1 - xk * xj)
    rhs = rhs * z_tilde(rest, params)
    return (lhs == rhs, float(abs(lhs - rhs)))


def _check_degree(xs, params, rng):
    """deg_{x_1} Z~ <= m+1: interpolate through m+2 points, test at an m+3rd."""
    m = len(xs)
    others = list(xs[1:])
    pts = _sample_points(rng, _avoiders(others, params), m + 3)
    vals = [z_tilde((p,) + tuple(others), params) for p in pts]
    predicted = _lagrange_eval(pts[: m + 2], vals[: m + 2], pts[m + 2])
    return (predicted == vals[m + 2], float(abs(predicted - vals[m + 2])))
