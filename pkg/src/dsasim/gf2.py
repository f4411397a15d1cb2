"""GF(2) vectors, coefficient-tracked equations and Gauss-Jordan decoding.

Bit vectors are packed into Python integers (bit ``i`` is coordinate ``i``),
which keeps XOR of long vectors a single machine-level operation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple


class LengthMismatchError(ValueError):
    pass


class CorruptSystemError(RuntimeError):
    """Two equations agree on coefficients but disagree on payload."""


def iter_bits(value: int) -> Iterator[int]:
    """Indices of the set bits of ``value``, lowest first."""
    while value:
        low = value & -value
        yield low.bit_length() - 1
        value ^= low


@dataclass(frozen=True)
class BitVector:
    length: int
    bits: int = 0

    def __post_init__(self):
        if self.length < 0:
            raise ValueError("length must be non-negative")
        if self.bits < 0 or self.bits >> self.length:
            raise ValueError(f"bits do not fit in length {self.length}")

    @classmethod
    def zeros(cls, length: int) -> BitVector:
        return cls(length, 0)

    @classmethod
    def unit(cls, length: int, index: int) -> BitVector:
        if not 0 <= index < length:
            raise IndexError(f"index {index} out of range for length {length}")
        return cls(length, 1 << index)

    @classmethod
    def from_indices(cls, length: int, indices: Iterable[int]) -> BitVector:
        bits = 0
        for i in indices:
            if not 0 <= i < length:
                raise IndexError(f"index {i} out of range for length {length}")
            bits ^= 1 << i
        return cls(length, bits)

    def __xor__(self, other: BitVector) -> BitVector:
        if not isinstance(other, BitVector):
            return NotImplemented
        if other.length != self.length:
            raise LengthMismatchError(f"cannot XOR lengths {self.length} and {other.length}")
        return BitVector(self.length, self.bits ^ other.bits)

    def __getitem__(self, index: int) -> int:
        if not 0 <= index < self.length:
            raise IndexError(index)
        return (self.bits >> index) & 1

    def __len__(self) -> int:
        return self.length

    def __bool__(self) -> bool:
        return self.bits != 0

    def weight(self) -> int:
        return self.bits.bit_count()

    def indices(self) -> list[int]:
        return list(iter_bits(self.bits))

    def to_hex(self) -> str:
        return format(self.bits, "x")


@dataclass(frozen=True)
class Equation:
    """One buffer slot: which sensors are mixed in, and the XOR of their payloads."""

    coeffs: BitVector
    payload: BitVector

    @classmethod
    def empty(cls, k: int, payload_bits: int) -> Equation:
        return cls(BitVector.zeros(k), BitVector.zeros(payload_bits))

    @property
    def is_empty(self) -> bool:
        return not self.coeffs and not self.payload

    def __xor__(self, other: Equation) -> Equation:
        return Equation(self.coeffs ^ other.coeffs, self.payload ^ other.payload)


def xor_accumulate(eq: Equation, sensor_index: int, payload: BitVector) -> Equation:
    """Mix one sensor's payload into ``eq``, flipping its coefficient bit."""
    k = eq.coeffs.length
    if not 0 <= sensor_index < k:
        raise IndexError(f"sensor {sensor_index} out of range for k={k}")
    if payload.length != eq.payload.length:
        raise LengthMismatchError(
            f"payload has {payload.length} bits, equation carries {eq.payload.length}"
        )
    return Equation(
        BitVector(k, eq.coeffs.bits ^ (1 << sensor_index)),
        BitVector(payload.length, eq.payload.bits ^ payload.bits),
    )


@dataclass(frozen=True)
class LinearSystem:
    k: int
    rows: tuple[Equation, ...] = ()
    payload_bits: int | None = None

    def __post_init__(self):
        rows = tuple(self.rows)
        object.__setattr__(self, "rows", rows)
        c = self.payload_bits
        for row in rows:
            if row.coeffs.length != self.k:
                raise LengthMismatchError(f"row has {row.coeffs.length} coefficients, system has k={self.k}")
            if c is None:
                c = row.payload.length
            elif row.payload.length != c:
                raise LengthMismatchError("rows carry payloads of different lengths")
        object.__setattr__(self, "payload_bits", c if c is not None else 0)

    def __len__(self) -> int:
        return len(self.rows)


class EliminationResult(NamedTuple):
    rank: int
    recovered: frozenset[int]
    solved_payloads: dict[int, BitVector]


class EliminationBasis:
    """Row space kept in fully reduced echelon form, built one row at a time.

    Each stored row is keyed by its pivot column, and no stored row has a bit
    set in another row's pivot column.  Sensor ``i`` is decodable exactly when
    the row with pivot ``i`` is the unit vector ``e_i``.  Rows are ``(coeffs,
    payload)`` integer pairs.
    """

    def __init__(self, k: int, payload_bits: int):
        self.k = k
        self.payload_bits = payload_bits
        self._coeffs: dict[int, int] = {}
        self._payloads: dict[int, int] = {}
        # pivots whose row still mixes several sensors
        self._mixed: set[int] = set()

    @property
    def rank(self) -> int:
        return len(self._coeffs)

    @property
    def recovered_count(self) -> int:
        return len(self._coeffs) - len(self._mixed)

    def recovered(self) -> frozenset[int]:
        return frozenset(p for p in self._coeffs if p not in self._mixed)

    def solved_payloads(self) -> dict[int, BitVector]:
        c = self.payload_bits
        return {p: BitVector(c, self._payloads[p]) for p in sorted(self._coeffs) if p not in self._mixed}

    def add(self, coeffs: int, payload: int) -> bool:
        """Insert one equation. Returns True if the rank grew."""
        if coeffs >> self.k:
            raise LengthMismatchError(f"coefficients exceed k={self.k}")
        rows, loads = self._coeffs, self._payloads
        # Stored rows carry no foreign pivot bits, so one pass over the
        # original bits clears every pivot column.
        for b in iter_bits(coeffs):
            if b in rows:
                coeffs ^= rows[b]
                payload ^= loads[b]
        if not coeffs:
            if payload:
                raise CorruptSystemError("equation reduces to zero coefficients with a non-zero payload")
            return False
        pivot = (coeffs & -coeffs).bit_length() - 1
        bit = 1 << pivot
        # Unit rows cannot contain the new pivot column; only mixed rows need clearing.
        for q in list(self._mixed):
            if rows[q] & bit:
                rows[q] ^= coeffs
                loads[q] ^= payload
                if rows[q] == 1 << q:
                    self._mixed.discard(q)
        rows[pivot] = coeffs
        loads[pivot] = payload
        if coeffs != bit:
            self._mixed.add(pivot)
        return True

    def add_equation(self, eq: Equation) -> bool:
        if eq.coeffs.length != self.k:
            raise LengthMismatchError(f"equation has {eq.coeffs.length} coefficients, basis has k={self.k}")
        return self.add(eq.coeffs.bits, eq.payload.bits)

    def result(self) -> EliminationResult:
        return EliminationResult(self.rank, self.recovered(), self.solved_payloads())


def eliminate(sys: LinearSystem) -> EliminationResult:
    basis = EliminationBasis(sys.k, sys.payload_bits)
    for row in sys.rows:
        basis.add(row.coeffs.bits, row.payload.bits)
    return basis.result()


def recoverable_count(sys: LinearSystem) -> int:
    return len(eliminate(sys).recovered)
