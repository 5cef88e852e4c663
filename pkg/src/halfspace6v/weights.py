"""Local vertex and boundary weights of the stochastic six-vertex model
in half-space, plus exact verification of the local algebraic relations.

Edge states are 0/1 (path absent/present).  A bulk vertex with edges
(i, j; k, l) = (bottom, left; top, right) and spectral argument z carries
one of six nonzero weights; the "dotted" variant is the same table
re-normalised by (1-qz)/(1-z), and the "rotated" variant is the table
read after a 90-degree counterclockwise rotation (used on the lower,
left-moving row of a double-row operator).

A boundary (K) vertex has a single incoming and outgoing edge and weights
parameterised through

    h(x) = a*c*(1-x^2) / ((a-x)*(c-x)),

with the c -> infinity degeneration h(x) = a*(1-x^2)/(a-x) implemented as
its own table (entries 1-h, h, 0, 1).
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, replace
from fractions import Fraction

from .errors import DivisionByZero
from .scalars import COMPLEX, RATIONAL, parse_scalar, rand_rational

STOCHASTIC = "stochastic"
DOTTED = "dotted"
ROTATED = "rotated"

LOCAL_RELATIONS = ("ybe", "reflection", "r_unitarity", "k_unitarity", "factorization")


@dataclass(frozen=True)
class ModelParams:
    """Model parameters: q, boundary (a, c), and the three alphabets.

    The y-alphabet is extended on demand with a constant tail equal to its
    last entry (homogeneous specialisations use y = (1,)).
    """

    q: object
    a: object
    c: object = None
    x: tuple = ()
    z: tuple = ()
    y: tuple = (1,)
    c_infinite: bool = False

    def __post_init__(self):
        frac = lambda v: Fraction(v) if isinstance(v, int) else v
        object.__setattr__(self, "q", frac(self.q))
        object.__setattr__(self, "a", frac(self.a))
        object.__setattr__(self, "c", frac(self.c) if self.c is not None else None)
        object.__setattr__(self, "x", tuple(frac(v) for v in self.x))
        object.__setattr__(self, "z", tuple(frac(v) for v in self.z))
        y = tuple(frac(v) for v in self.y) if self.y else (Fraction(1),)
        object.__setattr__(self, "y", y)
        if not self.c_infinite and self.c is None:
            raise ValueError("c is required unless c_infinite is set")

    def y_at(self, j: int):
        """Vertical spectral parameter at column j (1-based), constant tail."""
        if j < 1:
            raise ValueError("column index is 1-based")
        return self.y[j - 1] if j <= len(self.y) else self.y[-1]

    @property
    def y_tail(self):
        return self.y[-1]

    def with_y(self, y) -> "ModelParams":
        return replace(self, y=tuple(y))

    def backend(self) -> str:
        return RATIONAL if isinstance(self.q, (Fraction, int)) else COMPLEX


def params_from_json(obj: dict, backend: str = RATIONAL) -> ModelParams:
    """Build ModelParams from the parameter-file JSON object."""
    c_infinite = bool(obj.get("c_infinite", False))
    p = lambda key, default=None: (
        parse_scalar(obj[key], backend) if key in obj else default
    )
    alph = lambda key: tuple(parse_scalar(v, backend) for v in obj.get(key, ()))
    return ModelParams(
        q=p("q"),
        a=p("a"),
        c=None if c_infinite and "c" not in obj else p("c"),
        x=alph("x"),
        z=alph("z"),
        y=alph("y") or (Fraction(1) if backend == RATIONAL else 1.0,),
        c_infinite=c_infinite,
    )


def load_params(path: str, backend: str = RATIONAL) -> ModelParams:
    with open(path) as fh:
        return params_from_json(json.load(fh), backend)


# ---------------------------------------------------------------------------
# Boundary weights
# ---------------------------------------------------------------------------


def _div(top, bottom):
    if isinstance(top, int) and isinstance(bottom, int):
        return Fraction(top, bottom)
    return top / bottom


def h_func(x, params: ModelParams):
    """h(x) = ac(1-x^2)/((a-x)(c-x)); a(1-x^2)/(a-x) when c is infinite.

    h(+-1) is exactly 0: the numerator zero takes precedence, so the
    boundary matrix at x = +-1 is the identity for every (a, c), which is
    the convention behind A(+-1) = id and the odd-size Pfaffian reduction
    Z_{2l-1}(x) = Z_{2l}(x, 1) even at degenerate boundary points like
    a = 1, c = -1.
    """
    if not hasattr(x, "shape") and (x == 1 or x == -1):
        return 0 * x
    top = params.a if params.c_infinite else params.a * params.c
    top = top * (1 - x) * (1 + x)
    bottom = params.a - x
    if not params.c_infinite:
        bottom = bottom * (params.c - x)
    if not hasattr(bottom, "shape") and bottom == 0:
        raise DivisionByZero(f"h(x): pole (a-x) or (c-x) vanishes at x={x}")
    return _div(top, bottom)


def h_over_ac(x, params: ModelParams):
    """h(x)/(ac) = (1-x^2)/((a-x)(c-x)); identically 0 when c is infinite."""
    if params.c_infinite:
        return 0
    if not hasattr(x, "shape") and (x == 1 or x == -1):
        return 0 * x
    bottom = (params.a - x) * (params.c - x)
    if not hasattr(bottom, "shape") and bottom == 0:
        raise DivisionByZero(f"h(x)/ac: pole vanishes at x={x}")
    return _div((1 - x) * (1 + x), bottom)


def boundary_weight(i: int, j: int, x, params: ModelParams):
    """K-weight for incoming edge state i and outgoing edge state j."""
    if (i, j) == (0, 0):
        return 1 - h_func(x, params)
    if (i, j) == (0, 1):
        return h_func(x, params)
    if (i, j) == (1, 0):
        return -h_over_ac(x, params)
    if (i, j) == (1, 1):
        return 1 + h_over_ac(x, params)
    raise ValueError(f"edge states must be 0/1, got ({i}, {j})")


# ---------------------------------------------------------------------------
# Bulk weights
# ---------------------------------------------------------------------------

# (i, j, k, l) -> weight builder; anything absent violates the ice rule.
_STOCH_TABLE = {
    (0, 0, 0, 0): lambda z, q: 1,
    (1, 0, 1, 0): lambda z, q: q * (1 - z) / (1 - q * z),
    (1, 0, 0, 1): lambda z, q: (1 - q) / (1 - q * z),
    (1, 1, 1, 1): lambda z, q: 1,
    (0, 1, 0, 1): lambda z, q: (1 - z) / (1 - q * z),
    (0, 1, 1, 0): lambda z, q: z * (1 - q) / (1 - q * z),
}

_DOTTED_TABLE = {
    (0, 0, 0, 0): lambda z, q: (1 - q * z) / (1 - z),
    (1, 0, 1, 0): lambda z, q: q,
    (1, 0, 0, 1): lambda z, q: (1 - q) / (1 - z),
    (1, 1, 1, 1): lambda z, q: (1 - q * z) / (1 - z),
    (0, 1, 0, 1): lambda z, q: 1,
    (0, 1, 1, 0): lambda z, q: z * (1 - q) / (1 - z),
}


def _entries_by_input(table, key_map=None):
    out = {}
    for (i, j, k, l), fn in table.items():
        if key_map:
            i, j, k, l = key_map(i, j, k, l)
        out.setdefault((i, j), []).append(((k, l), fn))
    return out

# rotated key (vert_in, right_in; vert_out, left_out) <-> stochastic (i,j;k,l)
_STOCH_BY_INPUT = _entries_by_input(_STOCH_TABLE)
_DOTTED_BY_INPUT = _entries_by_input(_DOTTED_TABLE)
_ROTATED_BY_INPUT = _entries_by_input(
    _STOCH_TABLE, key_map=lambda i, j, k, l: (j, i, l, k)
)


def bulk_entries(i, j, variant):
    """Nonzero table entries for fixed input edges (i, j): [((k, l), fn)].

    For the rotated variant the input pair is (vertical-in, right-in) and the
    output pair (vertical-out, left-out), matching a left-moving lower row.
    """
    table = {
        STOCHASTIC: _STOCH_BY_INPUT,
        DOTTED: _DOTTED_BY_INPUT,
        ROTATED: _ROTATED_BY_INPUT,
    }[variant]
    return table.get((i, j), ())


def bulk_weight(i, j, k, l, z, variant, q):
    """Weight of a bulk vertex (i, j; k, l) at spectral argument z.

    variant: 'stochastic', 'dotted', or 'rotated' (the stochastic table
    under 90-degree counterclockwise rotation, so that the first two
    arguments are the vertical-in and right-in edges of a left-moving row).
    """
    if variant == ROTATED:
        i, j, k, l = j, i, l, k
        variant = STOCHASTIC
    table = _STOCH_TABLE if variant == STOCHASTIC else _DOTTED_TABLE
    fn = table.get((i, j, k, l))
    if fn is None:
        return 0
    den = (1 - q * z) if variant == STOCHASTIC else (1 - z)
    if not hasattr(den, "shape") and den == 0:
        raise DivisionByZero(f"bulk weight denominator vanished at z={z}")
    return fn(z, q)


# ---------------------------------------------------------------------------
# Matrix forms (exact dense linear algebra on 2/4/8-dimensional spaces)
# ---------------------------------------------------------------------------


def _matmul(A, B):
    n, m, p = len(A), len(B), len(B[0])
    return [
        [sum(A[r][k] * B[k][c] for k in range(m)) for c in range(p)] for r in range(n)
    ]


def _eye(n):
    return [[1 if r == c else 0 for c in range(n)] for r in range(n)]


def r_matrix(z, q, variant=STOCHASTIC):
    """4x4 R-matrix on V1 (horizontal) x V2 (vertical).

    Row/column index is 2*v1 + v2; entry [(j, i), (l, k)] is the vertex
    weight (i, j; k, l).
    """
    M = [[0] * 4 for _ in range(4)]
    for i in range(2):
        for j in range(2):
            for k in range(2):
                for l in range(2):
                    w = bulk_weight(i, j, k, l, z, variant, q)
                    if w != 0:
                        M[2 * j + i][2 * l + k] = w
    return M


def k_matrix(x, params: ModelParams):
    return [
        [boundary_weight(0, 0, x, params), boundary_weight(0, 1, x, params)],
        [boundary_weight(1, 0, x, params), boundary_weight(1, 1, x, params)],
    ]


def _embed_two_site(M4, n_spaces, s1, s2):
    """Embed a two-space operator (indices as in r_matrix: first slot is the
    horizontal space s1, second the vertical space s2) into n_spaces qubits."""
    dim = 1 << n_spaces
    out = [[0] * dim for _ in range(dim)]
    for row in range(dim):
        bits = [(row >> (n_spaces - 1 - s)) & 1 for s in range(n_spaces)]
        r4 = 2 * bits[s1] + bits[s2]
        for c4 in range(4):
            w = M4[r4][c4]
            if w == 0:
                continue
            nb = list(bits)
            nb[s1], nb[s2] = c4 >> 1, c4 & 1
            col = 0
            for b in nb:
                col = (col << 1) | b
            out[row][col] = out[row][col] + w
    return out


def _embed_one_site(M2, n_spaces, s):
    dim = 1 << n_spaces
    out = [[0] * dim for _ in range(dim)]
    for row in range(dim):
        bits = [(row >> (n_spaces - 1 - t)) & 1 for t in range(n_spaces)]
        for b in range(2):
            w = M2[bits[s]][b]
            if w == 0:
                continue
            nb = list(bits)
            nb[s] = b
            col = 0
            for bb in nb:
                col = (col << 1) | bb
            out[row][col] = out[row][col] + w
    return out


def _max_abs_diff(A, B):
    return max(abs(a - b) for ra, rb in zip(A, B) for a, b in zip(ra, rb))


def verify_local_relation(
    relation: str, point: dict, float_tol: float = 1e-10
) -> tuple[bool, float]:
    """Check one local relation at a concrete parameter point.

    point carries whichever of q, a, c, x, y, z the relation needs (plus
    c_infinite).  Both sides are contracted over all internal edge states
    for every fixed boundary assignment, i.e. compared entrywise as dense
    matrices.  Returns (equal, max residual); equality is exact in the
    rational backend, within float_tol (weights are O(1)) otherwise.
    """
    q = point.get("q")
    x = point.get("x")
    y = point.get("y")
    z = point.get("z")

    if relation == "ybe":
        lhs = _matmul(
            _matmul(
                _embed_two_site(r_matrix(y / x, q), 3, 0, 1),
                _embed_two_site(r_matrix(z / x, q), 3, 0, 2),
            ),
            _embed_two_site(r_matrix(z / y, q), 3, 1, 2),
        )
        rhs = _matmul(
            _matmul(
                _embed_two_site(r_matrix(z / y, q), 3, 1, 2),
                _embed_two_site(r_matrix(z / x, q), 3, 0, 2),
            ),
            _embed_two_site(r_matrix(y / x, q), 3, 0, 1),
        )
    elif relation == "reflection":
        params = _point_params(point)
        R12 = lambda w: _embed_two_site(r_matrix(w, q), 2, 0, 1)
        R21 = lambda w: _embed_two_site(r_matrix(w, q), 2, 1, 0)
        K1 = _embed_one_site(k_matrix(x, params), 2, 0)
        K2 = _embed_one_site(k_matrix(y, params), 2, 1)
        lhs = _matmul(_matmul(_matmul(R21(x / y), K1), R12(x * y)), K2)
        rhs = _matmul(_matmul(_matmul(K2, R21(x * y)), K1), R12(x / y))
    elif relation == "r_unitarity":
        lhs = _matmul(
            _embed_two_site(r_matrix(x / y, q), 2, 1, 0),
            _embed_two_site(r_matrix(y / x, q), 2, 0, 1),
        )
        rhs = _eye(4)
    elif relation == "k_unitarity":
        params = _point_params(point)
        lhs = _matmul(k_matrix(x, params), k_matrix(1 / x, params))
        rhs = _eye(2)
    elif relation == "factorization":
        lhs = r_matrix(1, q)
        rhs = [[0] * 4 for _ in range(4)]
        for i in range(2):
            for j in range(2):
                rhs[2 * j + i][2 * i + j] = 1  # delta_{i,l} delta_{j,k}
    else:
        raise ValueError(f"unknown relation {relation!r}")

    resid = _max_abs_diff(lhs, rhs)
    exact = all(
        isinstance(v, (Fraction, int)) for v in point.values() if not isinstance(v, bool)
    )
    ok = resid == 0 if exact else float(resid) <= float_tol
    return ok, float(resid)


def _point_params(point: dict) -> ModelParams:
    return ModelParams(
        q=point.get("q", 0),
        a=point.get("a"),
        c=point.get("c"),
        c_infinite=point.get("c_infinite", False),
    )


def random_relation_point(relation: str, rng: random.Random) -> dict:
    """Random rational parameter point with all relevant denominators nonzero."""
    while True:
        pt = {
            "q": rand_rational(rng),
            "x": rand_rational(rng),
            "y": rand_rational(rng),
            "z": rand_rational(rng),
            "a": rand_rational(rng),
            "c": rand_rational(rng),
        }
        try:
            if _relation_point_ok(relation, pt):
                return pt
        except ZeroDivisionError:
            continue


def _relation_point_ok(relation: str, pt: dict) -> bool:
    q, x, y, z, a, c = (pt[k] for k in "qxyzac")
    if 0 in (x, y, z) or q == 1:
        return False
    ratios = [y / x, z / x, z / y, x * y, x / y, 1 / x]
    if any(r == 0 for r in ratios):
        return False
    for w in ratios:
        if 1 - q * w == 0 or (relation == "reflection" and w == 1):
            return False
    if relation in ("reflection", "k_unitarity"):
        for p in (a, c):
            for v in (x, y, 1 / x, 1 / y):
                if p - v == 0:
                    return False
    return True


def verify_all_local_relations(trials: int = 20, seed: int = 0) -> dict:
    """Run every local relation at `trials` random rational points.

    Returns {relation: (all_exact, max_residual)}.
    """
    report = {}
    for idx, relation in enumerate(LOCAL_RELATIONS):
        rng = random.Random(100003 * seed + idx)
        worst = 0.0
        ok = True
        for _ in range(trials):
            pt = random_relation_point(relation, rng)
            good, resid = verify_local_relation(relation, pt)
            ok = ok and good
            worst = max(worst, resid)
        report[relation] = (ok, worst)
    return report
