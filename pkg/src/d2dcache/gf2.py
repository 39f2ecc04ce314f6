"""GF(2) linear algebra on int bitsets (bit j set = coordinate j is 1)."""

from __future__ import annotations


class SpanBasis:
    """Incremental echelon basis that remembers how each row was formed.

    Row ``r`` added through :meth:`add` gets tag bit ``1 << r``; :meth:`express`
    returns the XOR of tags whose rows sum to the query vector.
    """

    def __init__(self) -> None:
        self._pivots: dict[int, tuple[int, int]] = {}  # pivot bit -> (vec, tags)
        self.n_rows = 0

    @property
    def rank(self) -> int:
        return len(self._pivots)

    def _reduce(self, vec: int, tags: int) -> tuple[int, int]:
        while vec:
            top = vec.bit_length() - 1
            row = self._pivots.get(top)
            if row is None:
                break
            vec ^= row[0]
            tags ^= row[1]
        return vec, tags

    def add(self, vec: int) -> bool:
        """Insert a row; returns False when it was already in the span."""
        vec, tags = self._reduce(vec, 1 << self.n_rows)
        self.n_rows += 1
        if not vec:
            return False
        self._pivots[vec.bit_length() - 1] = (vec, tags)
        return True

    def express(self, vec: int) -> int | None:
        """Tag mask of rows summing to ``vec``, or None if outside the span."""
        rest, tags = self._reduce(vec, 0)
        return None if rest else tags


def rank(rows: list[int]) -> int:
    basis = SpanBasis()
    for r in rows:
        basis.add(r)
    return basis.rank


def in_span(vec: int, rows: list[int]) -> bool:
    basis = SpanBasis()
    for r in rows:
        basis.add(r)
    return basis.express(vec) is not None


def iter_bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low
