"""Pfaffians of skew-symmetric matrices over both backends.

The exact backend expands recursively along the first row with memoisation
on index subsets (practical up to order ~12); the float backend reduces to
skew tridiagonal form by a Parlett-Reid congruence with partial pivoting,
which is valid for complex skew-symmetric matrices as well.  Also houses
the Pfaffian summation identity Pf(A+B) and the Stembridge factorisation
used by the triangular partition function.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations

from .errors import DivisionByZero, NotSkewSymmetric
from .scalars import is_exact


def check_skew(M, tol: float = 0.0) -> int:
    """Validate skew-symmetry (and even order for Pfaffian use); return n."""
    n = len(M)
    if any(len(row) != n for row in M):
        raise NotSkewSymmetric("matrix is not square")
    for i in range(n):
        if abs(M[i][i]) > tol:
            raise NotSkewSymmetric(f"nonzero diagonal entry at ({i},{i})")
        for j in range(i + 1, n):
            if abs(M[i][j] + M[j][i]) > tol:
                raise NotSkewSymmetric(f"M[{i}][{j}] != -M[{j}][{i}]")
    return n


def pfaffian(M, validate: bool = True, tol: float = 0.0):
    """Pfaffian of an even-order skew-symmetric matrix.

    Dispatches on the entry type: exact rationals/ints use the recursive
    expansion, floats/complex the O(n^3) tridiagonalisation.
    """
    n = len(M)
    if validate:
        check_skew(M, tol=tol)
    if n % 2 != 0:
        raise NotSkewSymmetric("Pfaffian requires even order (border odd inputs)")
    if n == 0:
        return 1
    if all(is_exact(v) for row in M for v in row):
        memo = {}
        return _pf_exact(M, tuple(range(n)), memo)
    return _pf_parlett_reid([list(map(complex, row)) for row in M])


def _pf_exact(M, idx, memo):
    if not idx:
        return Fraction(1)
    got = memo.get(idx)
    if got is not None:
        return got
    i0 = idx[0]
    rest = idx[1:]
    total = Fraction(0)
    for pos, j in enumerate(rest):
        a = M[i0][j]
        if a == 0:
            continue
        sub = rest[:pos] + rest[pos + 1 :]
        term = a * _pf_exact(M, sub, memo)
        total += term if pos % 2 == 0 else -term
    memo[idx] = total
    return total


def _pf_parlett_reid(A):
    """Pfaffian via LTL^T congruence with partial pivoting (float/complex)."""
    n = len(A)
    pf = 1.0 + 0.0j
    for k in range(0, n - 1, 2):
        pivot = max(range(k + 1, n), key=lambda r: abs(A[r][k]))
        if abs(A[pivot][k]) == 0.0:
            return 0.0 + 0.0j
        if pivot != k + 1:
            A[pivot], A[k + 1] = A[k + 1], A[pivot]
            for row in A:
                row[pivot], row[k + 1] = row[k + 1], row[pivot]
            pf = -pf
        pf *= A[k][k + 1]
        if k + 2 < n:
            inv = 1.0 / A[k][k + 1]
            tau = [A[k][j] * inv for j in range(k + 2, n)]
            col = [A[j][k + 1] for j in range(k + 2, n)]
            for r in range(k + 2, n):
                Ar = A[r]
                tr, cr = tau[r - k - 2], col[r - k - 2]
                for c in range(k + 2, n):
                    Ar[c] += tr * col[c - k - 2] - cr * tau[c - k - 2]
    return pf


def det_exact(M):
    """Exact determinant by fraction-free-ish Gaussian elimination.

    Independent of the Pfaffian code path; used as the Pf^2 = det oracle.
    """
    n = len(M)
    A = [[Fraction(v) for v in row] for row in M]
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if A[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            A[piv], A[col] = A[col], A[piv]
            det = -det
        det *= A[col][col]
        inv = 1 / A[col][col]
        for r in range(col + 1, n):
            f = A[r][col] * inv
            if f == 0:
                continue
            for c in range(col, n):
                A[r][c] -= f * A[col][c]
    return det


def principal_submatrix(M, idx):
    return [[M[r][c] for c in idx] for r in idx]


def pfaffian_sum(A, B):
    """Right-hand side of the Pfaffian summation identity:

        Pf(A+B) = sum_r (-1)^(r/2) sum_{|S|=r} (-1)^(sum S) Pf(A_S) Pf(B_Sc)

    with 1-based index sums and odd-order principal Pfaffians zero.
    """
    n = check_skew(A)
    if check_skew(B) != n:
        raise NotSkewSymmetric("orders differ")
    total = 0
    for r in range(0, n + 1, 2):
        sgn_r = (-1) ** (r // 2)
        for S in combinations(range(n), r):
            comp = tuple(i for i in range(n) if i not in S)
            sgn = sgn_r * (-1) ** (sum(S) + r)  # sum of 1-based indices
            pa = pfaffian(principal_submatrix(A, S), validate=False)
            pb = pfaffian(principal_submatrix(B, comp), validate=False)
            total = total + sgn * pa * pb
    return total


def pfaffian_sum_check(A, B) -> bool:
    """Verify Pf(A+B) against the summation identity (exact backends exactly)."""
    n = len(A)
    AB = [[A[r][c] + B[r][c] for c in range(n)] for r in range(n)]
    lhs = pfaffian(AB)
    rhs = pfaffian_sum(A, B)
    return lhs == rhs


def stembridge_check(x_alphabet) -> bool:
    """Pf of the kernel S(x_i, x_j) = (x_i-x_j)/(1-x_i x_j) equals the
    product over i<j of the same factors, exactly."""
    xs = list(x_alphabet)
    n = len(xs)
    if n % 2 != 0:
        raise NotSkewSymmetric("even alphabet required")
    M = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i != j:
                den = 1 - xs[i] * xs[j]
                if den == 0:
                    raise DivisionByZero("1 - x_i x_j vanished")
                M[i][j] = (xs[i] - xs[j]) / den
    prod = 1
    for i in range(n):
        for j in range(i + 1, n):
            prod = prod * M[i][j]
    return pfaffian(M) == prod
