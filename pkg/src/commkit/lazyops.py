"""Exact lazy operators on the sequence space l2.

Operators are immutable expression trees over six atoms: the positive
isometry spreading the basis onto even indices (n -> 2n), the one onto odd
indices (n -> 2n-1), their adjoints, the identity and zero.  Combinators:
scaling by an integer or EpsScalar, sums, composition (@), adjoint, 4x4
block assembly and conjugation by the block scaling diag(e^3, e^2, e^1, 1).

Basis indices are 1-based throughout.  A column is a dict from basis index
to EpsScalar; absent keys are zero.  apply() is exact integer/EpsScalar
arithmetic; a numeric eps enters only in compress().

The 4x4 block space interleaves the four summands: slot s in {1,2,3,4} with
internal index n sits at global index 4*(n-1) + s, so every finite window
of global indices samples all four slots.

Columns are memoized per (node, basis index); trees may be shared freely
between threads since nodes are never mutated after construction.
"""

from __future__ import annotations

import numpy as np

from .scalars import EpsScalar

__all__ = [
    "Column",
    "LazyOp",
    "block4",
    "compress",
    "conjugate_by_block_scaling",
    "even_isometry",
    "identity_op",
    "odd_isometry",
    "pair_swap",
    "zero_op",
]

Column = dict[int, EpsScalar]

_ONE = EpsScalar.one()


def _merge_into(acc: Column, col: Column, factor: EpsScalar | None = None) -> None:
    for idx, value in col.items():
        term = value if factor is None else factor * value
        if term.is_zero:
            continue
        current = acc.get(idx)
        total = term if current is None else current + term
        if total.is_zero:
            acc.pop(idx, None)
        else:
            acc[idx] = total


class LazyOp:
    """Base class for lazy operator expression trees."""

    __slots__ = ("_cache",)

    def __init__(self) -> None:
        self._cache: dict[int, Column] = {}

    def apply(self, n: int) -> Column:
        """Exact column of the operator at basis index n >= 1."""
        if not isinstance(n, int) or n < 1:
            raise ValueError(f"basis index must be a positive integer, got {n!r}")
        cached = self._cache.get(n)
        if cached is None:
            cached = self._column(n)
            self._cache[n] = cached
        return dict(cached)

    def _column(self, n: int) -> Column:
        raise NotImplementedError

    def adjoint(self) -> "LazyOp":
        raise NotImplementedError

    # -- combinator sugar --------------------------------------------------

    def __add__(self, other: "LazyOp") -> "LazyOp":
        if not isinstance(other, LazyOp):
            return NotImplemented
        return _Sum((self, other))

    def __sub__(self, other: "LazyOp") -> "LazyOp":
        if not isinstance(other, LazyOp):
            return NotImplemented
        return _Sum((self, _Scaled(EpsScalar.integer(-1), other)))

    def __neg__(self) -> "LazyOp":
        return _Scaled(EpsScalar.integer(-1), self)

    def __mul__(self, scalar) -> "LazyOp":
        s = _as_scalar(scalar)
        if s is None:
            return NotImplemented
        return _Scaled(s, self)

    __rmul__ = __mul__

    def __matmul__(self, other: "LazyOp") -> "LazyOp":
        if not isinstance(other, LazyOp):
            return NotImplemented
        return _Composition(self, other)


def _as_scalar(value) -> EpsScalar | None:
    if isinstance(value, EpsScalar):
        return value
    if isinstance(value, int) and not isinstance(value, bool):
        return EpsScalar.integer(value)
    return None


class _EvenIsometry(LazyOp):
    __slots__ = ()

    def _column(self, n: int) -> Column:
        return {2 * n: _ONE}

    def adjoint(self) -> LazyOp:
        return _EVEN_ADJ


class _EvenAdjoint(LazyOp):
    __slots__ = ()

    def _column(self, n: int) -> Column:
        return {n // 2: _ONE} if n % 2 == 0 else {}

    def adjoint(self) -> LazyOp:
        return _EVEN


class _OddIsometry(LazyOp):
    __slots__ = ()

    def _column(self, n: int) -> Column:
        return {2 * n - 1: _ONE}

    def adjoint(self) -> LazyOp:
        return _ODD_ADJ


class _OddAdjoint(LazyOp):
    __slots__ = ()

    def _column(self, n: int) -> Column:
        return {(n + 1) // 2: _ONE} if n % 2 == 1 else {}

    def adjoint(self) -> LazyOp:
        return _ODD


class _Identity(LazyOp):
    __slots__ = ()

    def _column(self, n: int) -> Column:
        return {n: _ONE}

    def adjoint(self) -> LazyOp:
        return self


class _Zero(LazyOp):
    __slots__ = ()

    def _column(self, n: int) -> Column:
        return {}

    def adjoint(self) -> LazyOp:
        return self


class _Scaled(LazyOp):
    __slots__ = ("scalar", "inner")

    def __init__(self, scalar: EpsScalar, inner: LazyOp):
        super().__init__()
        self.scalar = scalar
        self.inner = inner

    def _column(self, n: int) -> Column:
        out: Column = {}
        _merge_into(out, self.inner.apply(n), self.scalar)
        return out

    def adjoint(self) -> LazyOp:
        return _Scaled(self.scalar, self.inner.adjoint())


class _Sum(LazyOp):
    __slots__ = ("parts",)

    def __init__(self, parts: tuple[LazyOp, ...]):
        super().__init__()
        self.parts = parts

    def _column(self, n: int) -> Column:
        out: Column = {}
        for part in self.parts:
            _merge_into(out, part.apply(n))
        return out

    def adjoint(self) -> LazyOp:
        return _Sum(tuple(p.adjoint() for p in self.parts))


class _Composition(LazyOp):
    __slots__ = ("outer", "inner")

    def __init__(self, outer: LazyOp, inner: LazyOp):
        super().__init__()
        self.outer = outer
        self.inner = inner

    def _column(self, n: int) -> Column:
        out: Column = {}
        for idx, value in self.inner.apply(n).items():
            _merge_into(out, self.outer.apply(idx), value)
        return out

    def adjoint(self) -> LazyOp:
        return _Composition(self.inner.adjoint(), self.outer.adjoint())


class _Block4(LazyOp):
    __slots__ = ("grid",)

    def __init__(self, grid: tuple[tuple[LazyOp, ...], ...]):
        super().__init__()
        self.grid = grid

    def _column(self, g: int) -> Column:
        slot = (g - 1) % 4
        inner_index = (g - 1) // 4 + 1
        out: Column = {}
        for row in range(4):
            col = self.grid[row][slot].apply(inner_index)
            embedded = {4 * (m - 1) + row + 1: v for m, v in col.items()}
            _merge_into(out, embedded)
        return out

    def adjoint(self) -> LazyOp:
        transposed = tuple(
            tuple(self.grid[col][row].adjoint() for col in range(4)) for row in range(4)
        )
        return _Block4(transposed)


_EVEN = _EvenIsometry()
_EVEN_ADJ = _EvenAdjoint()
_ODD = _OddIsometry()
_ODD_ADJ = _OddAdjoint()
_IDENTITY = _Identity()
_ZERO = _Zero()


def even_isometry() -> LazyOp:
    """The positive isometry mapping basis vector n to 2n."""
    return _EVEN


def odd_isometry() -> LazyOp:
    """The positive isometry mapping basis vector n to 2n-1."""
    return _ODD


def pair_swap() -> LazyOp:
    """The involution exchanging basis vectors 2n-1 and 2n.

    Built as (even)(odd)* + (odd)(even)*, which evaluates to the swap.
    """
    return _EVEN @ _ODD_ADJ + _ODD @ _EVEN_ADJ


def identity_op() -> LazyOp:
    return _IDENTITY


def zero_op() -> LazyOp:
    return _ZERO


def block4(grid) -> LazyOp:
    """Assemble a 4x4 grid of lazy operators into one operator.

    Row i, column j of the grid maps slot-j vectors into slot i; slots are
    interleaved into global indices as documented in the module docstring.
    """
    rows = tuple(tuple(row) for row in grid)
    if len(rows) != 4 or any(len(r) != 4 for r in rows):
        raise ValueError("grid must be 4x4")
    for row in rows:
        for op in row:
            if not isinstance(op, LazyOp):
                raise TypeError(f"grid entries must be LazyOp, got {type(op).__name__}")
    return _Block4(rows)


def conjugate_by_block_scaling(op: LazyOp) -> LazyOp:
    """Conjugate a block-structured operator by diag(e^3 I, e^2 I, e I, I).

    Block (i, j) gains the exact factor eps**(j - i).  The input must be
    built from block4 assemblies (combined by scaling, sums and
    compositions); identity and zero commute with the scaling and pass
    through.  Raises ValueError for operators without slot structure.
    """
    if isinstance(op, _Block4):
        scaled_rows = []
        for i in range(4):
            row = []
            for j in range(4):
                block = op.grid[i][j]
                if i == j:
                    row.append(block)
                else:
                    row.append(_Scaled(EpsScalar.monomial(1, j - i), block))
            scaled_rows.append(tuple(row))
        return _Block4(tuple(scaled_rows))
    if isinstance(op, _Scaled):
        return _Scaled(op.scalar, conjugate_by_block_scaling(op.inner))
    if isinstance(op, _Sum):
        return _Sum(tuple(conjugate_by_block_scaling(p) for p in op.parts))
    if isinstance(op, _Composition):
        return _Composition(
            conjugate_by_block_scaling(op.outer), conjugate_by_block_scaling(op.inner)
        )
    if isinstance(op, (_Identity, _Zero)):
        return op
    raise ValueError("operator has no 4x4 slot structure to conjugate")


def compress(op: LazyOp, m: int, eps: float) -> np.ndarray:
    """The leading m x m corner of the operator, evaluated at eps in (0, 1].

    This is the two-sided finite section: entry (i, j) is the coefficient of
    basis vector i in the column at j, for i, j <= m.  Its spectral norm
    never exceeds the operator's.
    """
    if not isinstance(m, int) or m < 1:
        raise ValueError("window size must be a positive integer")
    if not (0.0 < eps <= 1.0):
        raise ValueError("eps must lie in (0, 1]")
    if not isinstance(op, LazyOp):
        raise TypeError("op must be a LazyOp")
    out = np.zeros((m, m))
    for j in range(1, m + 1):
        for i, value in op.apply(j).items():
            if i <= m:
                out[i - 1, j - 1] = value.evaluate(eps)
    return out
