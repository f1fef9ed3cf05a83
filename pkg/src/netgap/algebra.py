"""Exact arithmetic in F_{p^m} and dense linear algebra over it.

Field elements are plain integers in ``[0, p^m)``: base-p digit ``i`` is the
coefficient of ``x^i`` in the polynomial basis.  Matrices are immutable
tuples of rows.
"""

from __future__ import annotations

import functools
import itertools
from typing import Iterable, Sequence

TABLE_LIMIT = 256          # full add/mul tables up to this order
LOG_TABLE_LIMIT = 1 << 16  # exp/log tables up to this order


class FieldError(ValueError):
    pass


class SingularMatrixError(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_factors(n: int) -> list[int]:
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


def prime_power(q: int) -> tuple[int, int] | None:
    """Return ``(p, m)`` with ``q == p**m`` or None."""
    if q < 2:
        return None
    for p in prime_factors(q)[:1]:
        m = 0
        while q % p == 0:
            q //= p
            m += 1
        if q == 1:
            return p, m
    return None


# -- polynomials over F_p as coefficient lists, lowest degree first --------

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    a = _trim(list(a))
    db = len(b) - 1
    inv_lead = pow(b[-1], p - 2, p)
    while len(a) - 1 >= db and a:
        f = a[-1] * inv_lead % p
        shift = len(a) - 1 - db
        for i, c in enumerate(b):
            a[shift + i] = (a[shift + i] - f * c) % p
        _trim(a)
    return a


def _poly_mulmod(a, b, mod, p):
    out = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _poly_mod(out, mod, p)


def _poly_powmod(base, e, mod, p):
    result = [1]
    base = _poly_mod(base, mod, p)
    while e:
        if e & 1:
            result = _poly_mulmod(result, base, mod, p)
        base = _poly_mulmod(base, base, mod, p)
        e >>= 1
    return result


def poly_encoding(coeffs: Sequence[int], p: int) -> int:
    return sum(c * p**i for i, c in enumerate(coeffs))


def poly_from_encoding(code: int, p: int, length: int) -> list[int]:
    out = []
    for _ in range(length):
        code, d = divmod(code, p)
        out.append(d)
    return out


def is_irreducible(coeffs: Sequence[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree <= deg/2."""
    m = len(coeffs) - 1
    if m < 1:
        return False
    if m == 1:
        return True
    if coeffs[0] == 0:
        return False
    for d in range(1, m // 2 + 1):
        for low in range(p**d):
            divisor = poly_from_encoding(low, p, d) + [1]
            if not _poly_mod(coeffs, divisor, p):
                return False
    return True


def is_primitive(coeffs: Sequence[int], p: int) -> bool:
    """Irreducible and x has multiplicative order p^m - 1 modulo it."""
    m = len(coeffs) - 1
    if not is_irreducible(coeffs, p):
        return False
    order = p**m - 1
    if m == 1:
        root = (-coeffs[0]) % p
        if root == 0:
            return False
        return all(pow(root, order // f, p) != 1 for f in prime_factors(order))
    return all(_poly_powmod([0, 1], order // f, coeffs, p) != [1]
               for f in prime_factors(order))


@functools.lru_cache(maxsize=None)
def find_primitive_poly(p: int, m: int) -> tuple[int, ...]:
    """Lowest-encoding monic primitive polynomial of degree m over F_p."""
    if not is_prime(p):
        raise FieldError(f"{p} is not prime")
    for low in range(p**m):
        coeffs = poly_from_encoding(low, p, m) + [1]
        if is_primitive(coeffs, p):
            return tuple(coeffs)
    raise FieldError(f"no primitive polynomial of degree {m} over F_{p}")  # pragma: no cover


class FieldCtx:
    """The finite field F_{p^m} with a fixed polynomial basis."""

    def __init__(self, p: int, m: int = 1, modulus: Sequence[int] | None = None):
        if not is_prime(p):
            raise FieldError(f"characteristic {p} is not prime")
        if m < 1:
            raise FieldError("extension degree must be >= 1")
        if modulus is None:
            modulus = find_primitive_poly(p, m)
        modulus = tuple(int(c) % p for c in modulus)
        if len(modulus) != m + 1:
            raise FieldError(f"modulus must have degree {m}")
        if modulus[-1] != 1:
            raise FieldError("modulus must be monic")
        if not is_irreducible(modulus, p):
            raise FieldError(f"modulus {modulus} is reducible over F_{p}")
        self.p = p
        self.m = m
        self.q = p**m
        self.modulus = modulus
        self.modulus_primitive = is_primitive(modulus, p)
        self._build_tables()

    # -- construction ----------------------------------------------------
    def _slow_mul(self, a: int, b: int) -> int:
        p, m = self.p, self.m
        prod = _poly_mulmod(poly_from_encoding(a, p, m), poly_from_encoding(b, p, m),
                            list(self.modulus), p)
        return poly_encoding(prod, p)

    def _build_tables(self) -> None:
        p, m, q = self.p, self.m, self.q
        self._exp = self._log = None
        self._add = self._mul = None
        x = (-self.modulus[0]) % p if m == 1 else p
        if self.modulus_primitive:
            alpha = x
        else:
            alpha = next(a for a in range(2, q) if self._order_slow(a) == q - 1)
        self.alpha = alpha
        if q <= LOG_TABLE_LIMIT:
            exp = [0] * (2 * (q - 1))
            log = [0] * q
            cur = 1
            for i in range(q - 1):
                exp[i] = cur
                log[cur] = i
                cur = self._slow_mul(cur, alpha)
            exp[q - 1:] = exp[:q - 1]
            self._exp, self._log = exp, log
        if q <= TABLE_LIMIT:
            self._add = [[self._slow_add(a, b) for b in range(q)] for a in range(q)]
            self._mul = [[self.mul(a, b) for b in range(q)] for a in range(q)]
            self._neg = [self._slow_neg(a) for a in range(q)]
            self._inv = [0] + [self.inv(a) for a in range(1, q)]

    def _order_slow(self, a: int) -> int:
        if a == 0:
            return 0
        cur, k = a, 1
        while cur != 1:
            cur = self._slow_mul(cur, a)
            k += 1
        return k

    def _slow_add(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        if self.m == 1:
            return (a + b) % self.p
        p, m = self.p, self.m
        return poly_encoding([(x + y) % p for x, y in zip(poly_from_encoding(a, p, m),
                                                          poly_from_encoding(b, p, m))], p)

    def _slow_neg(self, a: int) -> int:
        if self.p == 2:
            return a
        if self.m == 1:
            return (-a) % self.p
        p, m = self.p, self.m
        return poly_encoding([(-x) % p for x in poly_from_encoding(a, p, m)], p)

    # -- arithmetic --------------------------------------------------------
    def add(self, a: int, b: int) -> int:
        if self._add is not None:
            return self._add[a][b]
        return self._slow_add(a, b)

    def neg(self, a: int) -> int:
        if self._add is not None:
            return self._neg[a]
        return self._slow_neg(a)

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self._mul is not None:
            return self._mul[a][b]
        if a == 0 or b == 0:
            return 0
        if self._exp is not None:
            return self._exp[self._log[a] + self._log[b]]
        return self._slow_mul(a, b)

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in a finite field")
        if self._mul is not None and getattr(self, "_inv", None) is not None:
            return self._inv[a]
        if self._exp is not None:
            return self._exp[(self.q - 1 - self._log[a]) % (self.q - 1)]
        return self.pow(a, self.q - 2)

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            if e == 0:
                return 1
            if e < 0:
                raise ZeroDivisionError("zero to a negative power")
            return 0
        e %= self.q - 1
        if self._exp is not None:
            return self._exp[self._log[a] * e % (self.q - 1)]
        result = 1
        while e:
            if e & 1:
                result = self._slow_mul(result, a)
            a = self._slow_mul(a, a)
            e >>= 1
        return result

    def log(self, a: int) -> int:
        """Discrete log base ``alpha``."""
        if a == 0:
            raise ValueError("log of zero")
        if self._log is not None:
            return self._log[a]
        cur, k = 1, 0
        while cur != a:
            cur = self._slow_mul(cur, self.alpha)
            k += 1
        return k

    def order(self, a: int) -> int:
        if a == 0:
            return 0
        n = self.q - 1
        for f in prime_factors(n):
            while n % f == 0 and self.pow(a, n // f) == 1:
                n //= f
        return n

    def elements(self) -> range:
        return range(self.q)

    def power_order(self) -> list[int]:
        """``[0, 1, alpha, alpha^2, ...]`` -- the enumeration shared with D_t."""
        return [0] + [self.pow(self.alpha, i) for i in range(self.q - 1)]

    def digits(self, a: int) -> list[int]:
        return poly_from_encoding(a, self.p, self.m)

    def from_digits(self, digits: Sequence[int]) -> int:
        return poly_encoding(digits, self.p)

    # -- row kernels used by elimination -----------------------------------
    def row_sub_scaled(self, dst: list[int], f: int, src: Sequence[int]) -> list[int]:
        """``dst - f*src`` elementwise."""
        if f == 0:
            return dst
        if self._mul is not None:
            mf = self._mul[f]
            if self.p == 2:
                return [a ^ mf[b] for a, b in zip(dst, src)]
            add, neg = self._add, self._neg
            return [add[a][neg[mf[b]]] for a, b in zip(dst, src)]
        return [self.sub(a, self.mul(f, b)) for a, b in zip(dst, src)]

    def row_scale(self, f: int, row: Sequence[int]) -> list[int]:
        if self._mul is not None:
            mf = self._mul[f]
            return [mf[b] for b in row]
        return [self.mul(f, b) for b in row]

    # -- identity ----------------------------------------------------------
    def _key(self):
        return (self.p, self.modulus)

    def __eq__(self, other):
        return isinstance(other, FieldCtx) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return f"FieldCtx(p={self.p}, m={self.m}, modulus={list(self.modulus)})"

    def __reduce__(self):
        return (FieldCtx, (self.p, self.m, self.modulus))

    def to_dict(self) -> dict:
        return {"q": self.q, "p": self.p, "m": self.m, "modulus": list(self.modulus)}


def field_new(p: int, m: int = 1, modulus: Sequence[int] | None = None) -> FieldCtx:
    return FieldCtx(p, m, modulus)


@functools.lru_cache(maxsize=None)
def gf(q: int) -> FieldCtx:
    """Default field of order q (lowest-encoding primitive modulus)."""
    pm = prime_power(q)
    if pm is None:
        raise FieldError(f"{q} is not a prime power")
    return FieldCtx(*pm)


def field_arith(ctx: FieldCtx, op: str, a: int, b: int | None = None) -> int:
    if op == "add":
        return ctx.add(a, b)
    if op == "sub":
        return ctx.sub(a, b)
    if op == "mul":
        return ctx.mul(a, b)
    if op == "inv":
        return ctx.inv(a)
    if op == "pow":
        return ctx.pow(a, b)
    raise ValueError(f"unknown field operation {op!r}")


class MatrixGF:
    """Immutable dense matrix over a :class:`FieldCtx`."""

    __slots__ = ("ctx", "rows", "cols", "data")

    def __init__(self, ctx: FieldCtx, data: Iterable[Iterable[int]], cols: int | None = None):
        data = tuple(tuple(int(v) for v in row) for row in data)
        if cols is None:
            cols = len(data[0]) if data else 0
        for row in data:
            if len(row) != cols:
                raise ValueError("ragged matrix rows")
            for v in row:
                if not 0 <= v < ctx.q:
                    raise ValueError(f"entry {v} outside F_{ctx.q}")
        self.ctx = ctx
        self.rows = len(data)
        self.cols = cols
        self.data = data

    @classmethod
    def _raw(cls, ctx, data, cols):
        obj = cls.__new__(cls)
        obj.ctx, obj.data, obj.rows, obj.cols = ctx, data, len(data), cols
        return obj

    @classmethod
    def zeros(cls, ctx: FieldCtx, rows: int, cols: int) -> "MatrixGF":
        return cls._raw(ctx, tuple((0,) * cols for _ in range(rows)), cols)

    @classmethod
    def identity(cls, ctx: FieldCtx, n: int) -> "MatrixGF":
        return cls._raw(ctx, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)), n)

    @classmethod
    def column(cls, ctx: FieldCtx, values: Sequence[int]) -> "MatrixGF":
        return cls(ctx, [[v] for v in values], 1)

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def entries(self) -> list[int]:
        return [v for row in self.data for v in row]

    def __getitem__(self, ij):
        i, j = ij
        return self.data[i][j]

    def __eq__(self, other):
        return (isinstance(other, MatrixGF) and self.ctx == other.ctx
                and self.cols == other.cols and self.data == other.data)

    def __hash__(self):
        return hash((self.cols, self.data))

    def __repr__(self):
        return f"MatrixGF(F_{self.ctx.q}, {[list(r) for r in self.data]})"

    def _check(self, other: "MatrixGF"):
        if self.ctx != other.ctx:
            raise ValueError("matrices over different fields")

    def __add__(self, other: "MatrixGF") -> "MatrixGF":
        self._check(other)
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        add = self.ctx.add
        return MatrixGF._raw(self.ctx, tuple(tuple(add(a, b) for a, b in zip(r, s))
                                             for r, s in zip(self.data, other.data)), self.cols)

    def __neg__(self) -> "MatrixGF":
        neg = self.ctx.neg
        return MatrixGF._raw(self.ctx, tuple(tuple(neg(a) for a in r) for r in self.data),
                             self.cols)

    def __sub__(self, other: "MatrixGF") -> "MatrixGF":
        return self + (-other)

    def __matmul__(self, other: "MatrixGF") -> "MatrixGF":
        self._check(other)
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        ctx = self.ctx
        out = []
        for row in self.data:
            acc = [0] * other.cols
            for a, orow in zip(row, other.data):
                if a:
                    acc = ctx.row_sub_scaled(acc, ctx.neg(a), orow)
            out.append(tuple(acc))
        return MatrixGF._raw(ctx, tuple(out), other.cols)

    def scale(self, f: int) -> "MatrixGF":
        return MatrixGF._raw(self.ctx, tuple(tuple(self.ctx.row_scale(f, r)) for r in self.data),
                             self.cols)

    def __pow__(self, e: int) -> "MatrixGF":
        if self.rows != self.cols or e < 0:
            raise ValueError("matrix power needs a square matrix and e >= 0")
        result = MatrixGF.identity(self.ctx, self.rows)
        base = self
        while e:
            if e & 1:
                result = result @ base
            base = base @ base
            e >>= 1
        return result

    @property
    def T(self) -> "MatrixGF":
        return MatrixGF._raw(self.ctx, tuple(zip(*self.data)) if self.rows else
                             tuple(() for _ in range(self.cols)), self.rows)

    def is_zero(self) -> bool:
        return not any(any(r) for r in self.data)

    def submatrix(self, rows: slice | Sequence[int], cols: slice | Sequence[int]) -> "MatrixGF":
        ri = range(self.rows)[rows] if isinstance(rows, slice) else rows
        ci = range(self.cols)[cols] if isinstance(cols, slice) else cols
        return MatrixGF._raw(self.ctx, tuple(tuple(self.data[i][j] for j in ci) for i in ri),
                             len(ci))

    def row_block(self, start: int, stop: int) -> "MatrixGF":
        return MatrixGF._raw(self.ctx, self.data[start:stop], self.cols)

    def rank(self) -> int:
        return matrix_rank(self)

    def to_dict(self) -> dict:
        d = self.ctx.to_dict()
        d.update(rows=self.rows, cols=self.cols, entries=self.entries())
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "MatrixGF":
        ctx = FieldCtx(d["p"], d["m"], d["modulus"])
        if ctx.q != d.get("q", ctx.q):
            raise ValueError("inconsistent field order in matrix record")
        rows, cols, flat = d["rows"], d["cols"], d["entries"]
        if len(flat) != rows * cols:
            raise ValueError("entry count does not match shape")
        return cls(ctx, [flat[i * cols:(i + 1) * cols] for i in range(rows)], cols)


def vstack(mats: Sequence[MatrixGF]) -> MatrixGF:
    if not mats:
        raise ValueError("nothing to stack")
    ctx, cols = mats[0].ctx, mats[0].cols
    for M in mats:
        if M.cols != cols or M.ctx != ctx:
            raise ValueError("vstack: column or field mismatch")
    return MatrixGF._raw(ctx, tuple(itertools.chain.from_iterable(M.data for M in mats)), cols)


def hstack(mats: Sequence[MatrixGF]) -> MatrixGF:
    if not mats:
        raise ValueError("nothing to stack")
    rows = mats[0].rows
    for M in mats:
        if M.rows != rows or M.ctx != mats[0].ctx:
            raise ValueError("hstack: row or field mismatch")
    data = tuple(tuple(itertools.chain.from_iterable(M.data[i] for M in mats))
                 for i in range(rows))
    return MatrixGF._raw(mats[0].ctx, data, sum(M.cols for M in mats))


def block(blocks: Sequence[Sequence[MatrixGF]]) -> MatrixGF:
    return vstack([hstack(row) for row in blocks])


# -- elimination -------------------------------------------------------------

def _eliminate(ctx: FieldCtx, rows: list[list[int]], ncols: int, reduced: bool,
               pivot_limit: int | None = None) -> tuple[list[list[int]], list[int]]:
    """In-place style Gauss-Jordan; returns (rows, pivots)."""
    rows = [list(r) for r in rows]
    pivots = []
    r = 0
    n = len(rows)
    limit = ncols if pivot_limit is None else pivot_limit
    for c in range(limit):
        if r == n:
            break
        piv = next((i for i in range(r, n) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        lead = rows[r][c]
        if lead != 1:
            rows[r] = ctx.row_scale(ctx.inv(lead), rows[r])
        prow = rows[r]
        start = 0 if reduced else r + 1
        for i in range(start, n):
            if i != r and rows[i][c]:
                rows[i] = ctx.row_sub_scaled(rows[i], rows[i][c], prow)
        pivots.append(c)
        r += 1
    return rows, pivots


def matrix_rank(M: MatrixGF) -> int:
    if M.rows == 0 or M.cols == 0:
        return 0
    return len(_eliminate(M.ctx, M.data, M.cols, reduced=False)[1])


def matrix_rref(M: MatrixGF) -> tuple[MatrixGF, list[int]]:
    """Reduced row echelon form (zero rows kept at the bottom) and pivot columns."""
    rows, pivots = _eliminate(M.ctx, M.data, M.cols, reduced=True)
    return MatrixGF._raw(M.ctx, tuple(tuple(r) for r in rows), M.cols), pivots


def row_space_basis(M: MatrixGF) -> MatrixGF:
    """The nonzero rows of the RREF of M."""
    R, piv = matrix_rref(M)
    return R.row_block(0, len(piv))


def solve_consistent(A: MatrixGF, B: MatrixGF) -> MatrixGF:
    """Some X with A @ X == B (free variables set to zero).

    Raises SingularMatrixError when the system has no solution.
    """
    A._check(B)
    if A.rows != B.rows:
        raise ValueError("row count mismatch")
    aug = [list(a) + list(b) for a, b in zip(A.data, B.data)]
    rows, pivots = _eliminate(A.ctx, aug, A.cols + B.cols, reduced=True, pivot_limit=A.cols)
    for row in rows[len(pivots):]:
        if any(row[A.cols:]):
            raise SingularMatrixError("inconsistent linear system")
    X = [[0] * B.cols for _ in range(A.cols)]
    for i, c in enumerate(pivots):
        X[c] = rows[i][A.cols:]
    return MatrixGF._raw(A.ctx, tuple(tuple(r) for r in X), B.cols)


def solve_linear(A: MatrixGF, b: MatrixGF) -> MatrixGF:
    """Unique solution of A x = b for square invertible A."""
    if A.rows != A.cols:
        raise ValueError("solve_linear needs a square matrix")
    if matrix_rank(A) != A.rows:
        raise SingularMatrixError("matrix is singular")
    return solve_consistent(A, b)


def inverse(A: MatrixGF) -> MatrixGF:
    return solve_linear(A, MatrixGF.identity(A.ctx, A.rows))


def complete_to_full_rank(M: MatrixGF, k: int, target: int | None = None) -> MatrixGF:
    """k rows that lift ``vstack([M, rows])`` to rank ``min(rank(M)+k, n)``.

    Standard-basis rows on the non-pivot coordinates of rref(M), lowest index
    first; zero rows pad once the full space is reached.
    """
    n = M.cols
    target = n if target is None else target
    if target > n:
        raise ValueError("target rank exceeds the number of columns")
    if M.rows:
        _, pivots = matrix_rref(M)
    else:
        pivots = []
    rho = len(pivots)
    if rho + k < target:
        raise ValueError(f"cannot reach rank {target} from rank {rho} with {k} extra rows")
    pivset = set(pivots)
    missing = [c for c in range(n) if c not in pivset]
    out = []
    for c in missing[:k]:
        out.append(tuple(int(j == c) for j in range(n)))
    while len(out) < k:
        out.append((0,) * n)
    return MatrixGF._raw(M.ctx, tuple(out), n)


def nullspace(M: MatrixGF) -> MatrixGF:
    """Basis (as rows) of ``{x : M x = 0}``."""
    R, pivots = matrix_rref(M)
    ctx, n = M.ctx, M.cols
    free = [c for c in range(n) if c not in set(pivots)]
    out = []
    for f in free:
        v = [0] * n
        v[f] = 1
        for i, c in enumerate(pivots):
            v[c] = ctx.neg(R.data[i][f])
        out.append(tuple(v))
    return MatrixGF._raw(ctx, tuple(out), n)
