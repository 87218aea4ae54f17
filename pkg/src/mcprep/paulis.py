"""Pauli-word algebra over a symplectic (X-mask, Z-mask) encoding.

A word is stored as two integer bitmasks. Bit position n - 1 - q of a mask
corresponds to qubit q, so masks align with basis-state indices where qubit 0
is the most significant bit. The canonical operator for masks (x, z) is
i**popcount(x & z) * X^x * Z^z, which makes every word Hermitian and maps
popcount(x & z) to the number of Y letters.
"""
from __future__ import annotations

import dataclasses
import math

import numpy as np

_LETTERS = "IXZY"  # index = (x_bit) + 2 * (z_bit)

_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


class TermCapExceeded(RuntimeError):
    """Raised when a sum product would exceed the configured term budget."""


@dataclasses.dataclass(frozen=True)
class PauliWord:
    """Hermitian tensor product of single-qubit Pauli letters."""

    x_mask: int
    z_mask: int
    n_qubits: int

    def __post_init__(self) -> None:
        if self.n_qubits <= 0:
            raise ValueError("word needs at least one qubit")
        top = 1 << self.n_qubits
        if not (0 <= self.x_mask < top and 0 <= self.z_mask < top):
            raise ValueError("mask outside register")

    @classmethod
    def from_string(cls, letters: str) -> PauliWord:
        x = z = 0
        for ch in letters:
            x <<= 1
            z <<= 1
            if ch in ("X", "Y"):
                x |= 1
            if ch in ("Z", "Y"):
                z |= 1
            if ch not in "IXYZ":
                raise ValueError(f"invalid Pauli letter {ch!r} in {letters!r}")
        return cls(x, z, len(letters))

    def __str__(self) -> str:
        out = []
        for q in range(self.n_qubits):
            bit = self.n_qubits - 1 - q
            out.append(_LETTERS[((self.x_mask >> bit) & 1) + 2 * ((self.z_mask >> bit) & 1)])
        return "".join(out)

    @property
    def y_count(self) -> int:
        return (self.x_mask & self.z_mask).bit_count()

    @property
    def is_identity(self) -> bool:
        return self.x_mask == 0 and self.z_mask == 0

    def matrix(self) -> np.ndarray:
        """Dense matrix via explicit Kronecker products (oracle-grade path)."""
        out = np.eye(1, dtype=complex)
        for ch in str(self):
            out = np.kron(out, _MATRICES[ch])
        return out


def word_multiply(a: PauliWord, b: PauliWord) -> tuple[complex, PauliWord]:
    """Product of two words as (phase, canonical word), phase in {1, i, -1, -i}."""
    if a.n_qubits != b.n_qubits:
        raise ValueError(f"register mismatch: {a.n_qubits} vs {b.n_qubits}")
    x = a.x_mask ^ b.x_mask
    z = a.z_mask ^ b.z_mask
    y_out = (x & z).bit_count()
    exponent = (a.y_count + b.y_count - y_out + 2 * (a.z_mask & b.x_mask).bit_count()) % 4
    return 1j**exponent, PauliWord(x, z, a.n_qubits)


def apply_word(word: PauliWord, amps: np.ndarray) -> np.ndarray:
    """Apply a word to a statevector indexed with qubit 0 as the MSB."""
    dim = 1 << word.n_qubits
    if amps.shape[0] != dim:
        raise ValueError(f"state of dim {amps.shape[0]} does not match {word.n_qubits} qubits")
    indices = np.arange(dim)
    parity = np.zeros(dim, dtype=np.int64)
    z = word.z_mask
    while z:
        low = z & -z
        parity ^= (indices >> low.bit_length() - 1) & 1
        z ^= low
    phases = (1j**word.y_count) * np.where(parity, -1.0, 1.0)
    out = np.empty(dim, dtype=complex)
    out[indices ^ word.x_mask] = phases * amps
    return out


class PauliSum:
    """Real linear combination of Pauli words on a common register."""

    def __init__(self, terms: dict[PauliWord, float], n_qubits: int):
        for word in terms:
            if word.n_qubits != n_qubits:
                raise ValueError("term register size mismatch")
        self._terms = {w: float(c) for w, c in terms.items() if c != 0.0}
        self.n_qubits = n_qubits

    @classmethod
    def from_terms(cls, pairs, n_qubits: int | None = None) -> PauliSum:
        """Build from (coefficient, word-or-letter-string) pairs, collecting
        duplicates."""
        acc: dict[PauliWord, float] = {}
        width = n_qubits
        for coeff, word in pairs:
            if isinstance(word, str):
                word = PauliWord.from_string(word)
            if width is None:
                width = word.n_qubits
            acc[word] = acc.get(word, 0.0) + float(coeff)
        if width is None:
            raise ValueError("empty sum needs an explicit qubit count")
        return cls(acc, width)

    def terms(self) -> list[tuple[float, PauliWord]]:
        """Terms sorted by word text for deterministic iteration."""
        return sorted(((c, w) for w, c in self._terms.items()), key=lambda t: str(t[1]))

    @property
    def n_terms(self) -> int:
        return len(self._terms)

    def coefficient(self, word: PauliWord) -> float:
        return self._terms.get(word, 0.0)

    @property
    def identity_coefficient(self) -> float:
        return self._terms.get(PauliWord(0, 0, self.n_qubits), 0.0)

    def trace_over_dim(self) -> float:
        """Trace divided by 2**n_qubits; only the identity term contributes."""
        return self.identity_coefficient

    def scaled(self, factor: float) -> PauliSum:
        return PauliSum({w: c * factor for w, c in self._terms.items()}, self.n_qubits)

    def shifted(self, offset: float) -> PauliSum:
        """Add offset times the identity word."""
        ident = PauliWord(0, 0, self.n_qubits)
        terms = dict(self._terms)
        terms[ident] = terms.get(ident, 0.0) + offset
        return PauliSum(terms, self.n_qubits)

    def apply(self, amps: np.ndarray) -> np.ndarray:
        out = np.zeros_like(amps, dtype=complex)
        for word, coeff in self._terms.items():
            out += coeff * apply_word(word, amps)
        return out

    def matrix(self) -> np.ndarray:
        dim = 1 << self.n_qubits
        out = np.zeros((dim, dim), dtype=complex)
        for word, coeff in self._terms.items():
            out += coeff * word.matrix()
        return out

    def sparse_matrix(self):
        """CSR matrix built word by word; each word is a signed permutation."""
        import scipy.sparse as sp

        dim = 1 << self.n_qubits
        indices = np.arange(dim)
        total = sp.csr_matrix((dim, dim), dtype=complex)
        for word, coeff in self._terms.items():
            parity = np.zeros(dim, dtype=np.int64)
            z = word.z_mask
            while z:
                low = z & -z
                parity ^= (indices >> low.bit_length() - 1) & 1
                z ^= low
            data = coeff * (1j**word.y_count) * np.where(parity, -1.0, 1.0)
            rows = indices ^ word.x_mask
            total = total + sp.csr_matrix((data, (rows, indices)), shape=(dim, dim))
        return total


def sum_multiply(a: PauliSum, b: PauliSum, cap: int = 5_000_000) -> PauliSum:
    """Product of two sums with term collection.

    Imaginary parts of collected coefficients must stay below 1e-12; for
    Hermitian inputs whose product is Hermitian (e.g. powers of one sum) they
    cancel exactly.
    """
    if a.n_qubits != b.n_qubits:
        raise ValueError("register mismatch")
    if a.n_terms * b.n_terms > cap:
        raise TermCapExceeded(f"{a.n_terms} x {b.n_terms} partial products exceed cap {cap}")
    acc: dict[PauliWord, complex] = {}
    for ca, wa in a.terms():
        for cb, wb in b.terms():
            phase, word = word_multiply(wa, wb)
            acc[word] = acc.get(word, 0.0) + ca * cb * phase
    cleaned: dict[PauliWord, float] = {}
    for word, coeff in acc.items():
        if abs(coeff.imag) > 1e-12:
            raise ValueError(f"non-Hermitian product: term {word} has coefficient {coeff}")
        if coeff.real != 0.0:
            cleaned[word] = coeff.real
    return PauliSum(cleaned, a.n_qubits)


def sum_power(h: PauliSum, power: int, cap: int = 5_000_000) -> PauliSum:
    """h**power with term collection after every multiplication."""
    if power < 0:
        raise ValueError("power must be non-negative")
    result = PauliSum.from_terms([(1.0, PauliWord(0, 0, h.n_qubits))])
    for _ in range(power):
        result = sum_multiply(result, h, cap=cap)
    return result


def expectation_of_sum(h: PauliSum, amps: np.ndarray) -> float:
    """<psi|H|psi> for a normalized state; the imaginary residue must be tiny."""
    value = complex(np.vdot(amps, h.apply(amps)))
    if abs(value.imag) > 1e-10 * max(1.0, abs(value.real)):
        raise ValueError(f"expectation has imaginary residue {value.imag}")
    return value.real
