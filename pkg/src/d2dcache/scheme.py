"""Bit-exact one-shot D2D coded caching: MAN placement, XOR delivery with
leader pruning, and decoding.

Payloads are ``bytes``. File ``q`` is split into ``C(K, t)`` subfiles indexed
by the lexicographic rank of their cacher set ``V``; each subfile is cut into
``t`` contiguous sub-pieces, the j-th one owned by the j-th smallest member of
``V``. User ``i`` transmits, for every ``t``-set ``A`` of other users that
meets its leader set, the XOR of the sub-pieces ``W[d_k, A+i-k, i]`` for
``k`` in ``A``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from .combinatorics import MAX_USERS, binom, float12, frac_str, subset_rank, subsets
from .demand import Demand, LeaderSet, check_demand, n_distinct_excluding, select_leaders
from .gf2 import SpanBasis, iter_bits

FileLibrary = Sequence[bytes]
Subset = tuple[int, ...]


class SchemeError(Exception):
    pass


class PlacementError(SchemeError):
    pass


class DecodeError(SchemeError):
    """A needed sub-piece could not be recovered. Never expected for valid inputs."""


class DecodeMismatch(SchemeError):
    def __init__(self, message: str, witness: dict):
        super().__init__(message)
        self.witness = witness


@dataclass(frozen=True)
class SystemParams:
    N: int
    K: int
    t: int
    F: int  # bits

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("N must be >= 1")
        if not 2 <= self.K <= MAX_USERS:
            raise ValueError(f"K must lie in [2..{MAX_USERS}]")
        if not 1 <= self.t <= self.K:
            raise ValueError(f"t must lie in [1..K], got {self.t}")
        if self.F <= 0 or self.F % self.subpiece_unit:
            raise ValueError(
                f"F={self.F} bits must be a positive multiple of 8*t*C(K,t)={self.subpiece_unit}"
            )

    @classmethod
    def scaled(cls, N: int, K: int, t: int, F: int = 1) -> "SystemParams":
        """Round ``F`` up to the next multiple of ``8 t C(K,t)`` bits."""
        unit = 8 * t * math.comb(K, t)
        return cls(N, K, t, max(1, -(-F // unit)) * unit)

    @classmethod
    def from_subpiece_bytes(cls, N: int, K: int, t: int, subpiece_bytes: int = 1) -> "SystemParams":
        return cls(N, K, t, 8 * subpiece_bytes * t * math.comb(K, t))

    @property
    def subpiece_unit(self) -> int:
        return 8 * self.t * math.comb(self.K, self.t)

    @property
    def M(self) -> Fraction:
        return Fraction(self.t * self.N, self.K)

    @property
    def n_subfiles(self) -> int:
        return math.comb(self.K, self.t)

    @property
    def file_bytes(self) -> int:
        return self.F // 8

    @property
    def subfile_bytes(self) -> int:
        return self.file_bytes // self.n_subfiles

    @property
    def subpiece_bytes(self) -> int:
        return self.subfile_bytes // self.t


class SubPieceId(NamedTuple):
    file: int
    cachers: Subset
    owner: int


@dataclass
class CacheContents:
    user: int
    t: int
    pieces: dict[tuple[int, Subset], bytes] = field(default_factory=dict)

    @property
    def bits(self) -> int:
        return 8 * sum(len(p) for p in self.pieces.values())

    def subpiece(self, q: int, V: Subset, owner: int) -> bytes:
        try:
            data = self.pieces[(q, V)]
        except KeyError:
            raise PlacementError(f"user {self.user} does not cache W[{q},{set(V)}]") from None
        return _chunk(data, V, owner, self.t)


@dataclass(frozen=True)
class Codeword:
    transmitter: int
    target_set: Subset
    payload: bytes


@dataclass(frozen=True)
class Transmission:
    transmitter: int
    codewords: tuple[Codeword, ...]

    @property
    def bits(self) -> int:
        return 8 * sum(len(c.payload) for c in self.codewords)

    def by_target(self) -> dict[Subset, Codeword]:
        return {c.target_set: c for c in self.codewords}


class Recovery(NamedTuple):
    """How a decoder obtained one sub-piece."""

    piece: SubPieceId
    transmitter: int
    used: tuple[Subset, ...]  # target sets of the transmitter's codewords combined
    reconstructed: bool


def xor_bytes(*chunks: bytes) -> bytes:
    n = len(chunks[0])
    acc = 0
    for c in chunks:
        acc ^= int.from_bytes(c, "little")
    return acc.to_bytes(n, "little")


def _chunk(data: bytes, V: Subset, owner: int, t: int) -> bytes:
    if len(data) % t:
        raise PlacementError(f"subfile of {len(data)} bytes not divisible into {t} sub-pieces")
    size = len(data) // t
    j = V.index(owner)
    return data[j * size : (j + 1) * size]


def random_library(params: SystemParams, seed: int) -> tuple[bytes, ...]:
    """N random files drawn from the PCG64 stream ``seed`` (raw 64-bit words, little endian)."""
    bitgen = np.random.PCG64(seed)
    n_bytes = params.file_bytes
    files = []
    for _ in range(params.N):
        words = bitgen.random_raw(-(-n_bytes // 8)).astype("<u8")
        files.append(words.tobytes()[:n_bytes])
    return tuple(files)


def man_placement(params: SystemParams, library: FileLibrary) -> list[CacheContents]:
    """User k caches every subfile W[q, V] with k in V. Returns caches for users 1..K."""
    N, K, t = params.N, params.K, params.t
    if len(library) != N or any(len(w) != params.file_bytes for w in library):
        raise PlacementError(f"library must hold {N} files of {params.file_bytes} bytes")
    if params.file_bytes % params.n_subfiles:
        raise PlacementError("F is not divisible by C(K,t)")
    size = params.subfile_bytes
    caches = [CacheContents(k, t) for k in range(1, K + 1)]
    for rank, V in enumerate(subsets(range(1, K + 1), t)):
        for q, w in enumerate(library, start=1):
            chunk = w[rank * size : (rank + 1) * size]
            for k in V:
                caches[k - 1].pieces[(q, V)] = chunk
    return caches


def split_subpieces(cache: CacheContents, t: int) -> dict[SubPieceId, bytes]:
    out = {}
    for (q, V), data in cache.pieces.items():
        for owner in V:
            out[SubPieceId(q, V, owner)] = _chunk(data, V, owner, t)
    return out


def codeword_terms(i: int, A: Subset, d: Demand) -> list[SubPieceId]:
    """Sub-pieces XORed into Y^i_A: one per user k in A, the one k is missing."""
    full = set(A) | {i}
    return [SubPieceId(d[k - 1], tuple(sorted(full - {k})), i) for k in A]


def transmitted_targets(i: int, d: Demand, t: int, leaders: LeaderSet) -> list[Subset]:
    K = len(d)
    lead = set(leaders.leaders)
    others = [k for k in range(1, K + 1) if k != i]
    return [A for A in subsets(others, t) if lead.intersection(A)]


def encode_user(i: int, d: Sequence[int], leaders: LeaderSet, cache: CacheContents) -> Transmission:
    d = tuple(d)
    if cache.user != i or leaders.transmitter != i:
        raise ValueError("cache and leader set must belong to the transmitter")
    codewords = []
    for A in transmitted_targets(i, d, cache.t, leaders):
        chunks = [cache.subpiece(p.file, p.cachers, i) for p in codeword_terms(i, A, d)]
        codewords.append(Codeword(i, A, xor_bytes(*chunks)))
    return Transmission(i, tuple(codewords))


class _CodewordSpan:
    """GF(2) span of one transmitter's codewords, over its sub-piece symbols."""

    def __init__(self, transmission: Transmission, d: Demand):
        self.transmitter = transmission.transmitter
        self.d = d
        self.targets = [c.target_set for c in transmission.codewords]
        self._symbols: dict[SubPieceId, int] = {}
        self.basis = SpanBasis()
        for A in self.targets:
            self.basis.add(self.vector(A))

    def vector(self, A: Subset) -> int:
        v = 0
        for p in codeword_terms(self.transmitter, A, self.d):
            v ^= 1 << self._symbols.setdefault(p, len(self._symbols))
        return v

    def combination(self, A: Subset) -> tuple[Subset, ...] | None:
        """Transmitted target sets whose codewords XOR to Y^i_A, if any."""
        tags = self.basis.express(self.vector(A))
        if tags is None:
            return None
        return tuple(self.targets[r] for r in iter_bits(tags))


def decode_user_traced(
    k: int,
    d: Sequence[int],
    transmissions: Iterable[Transmission],
    cache: CacheContents,
) -> tuple[bytes, list[Recovery]]:
    """Recover W[d_k] and report, per missing sub-piece, which codewords were used.

    For sub-piece W[d_k, B+i, i] the decoder needs Y^i_{B+k}. When user ``i``
    pruned it, it is rebuilt as an XOR of codewords of user ``i`` alone.
    """
    d = tuple(d)
    K, t = len(d), cache.t
    by_user = {x.transmitter: x for x in transmissions}
    missing = [i for i in range(1, K + 1) if i != k and i not in by_user]
    if missing:
        raise DecodeError(f"user {k}: no transmission from users {missing}")
    lookup = {i: x.by_target() for i, x in by_user.items()}
    spans: dict[int, _CodewordSpan] = {}
    q = d[k - 1]
    parts = []
    trace = []
    for V in subsets(range(1, K + 1), t):
        if k in V:
            parts.append(cache.pieces[(q, V)])
            continue
        for i in V:
            A = tuple(sorted((set(V) - {i}) | {k}))
            cw = lookup[i].get(A)
            if cw is not None:
                used, y, rebuilt = (A,), cw.payload, False
            else:
                if i not in spans:
                    spans[i] = _CodewordSpan(by_user[i], d)
                used = spans[i].combination(A)
                if used is None:
                    raise DecodeError(f"user {k}: Y^{i}_{set(A)} not in span of X_{i}")
                y = xor_bytes(*(lookup[i][B].payload for B in used))
                rebuilt = True
            side = [
                cache.subpiece(p.file, p.cachers, i)
                for p in codeword_terms(i, A, d)
                if p.cachers != V
            ]
            parts.append(xor_bytes(y, *side))
            trace.append(Recovery(SubPieceId(q, V, i), i, used, rebuilt))
    return b"".join(parts), trace


def decode_user(k, d, transmissions, cache) -> bytes:
    return decode_user_traced(k, d, transmissions, cache)[0]


def measure_load(transmissions: Iterable[Transmission], F: int) -> Fraction:
    return Fraction(sum(x.bits for x in transmissions), F)


def pruned_codewords_in_span(d: Sequence[int], t: int, leaders: Mapping[int, LeaderSet] | None = None) -> list[tuple[int, Subset]]:
    """Pruned (transmitter, target set) pairs NOT in the span of that transmitter's codewords.

    Purely symbolic; an empty list means every pruned codeword can be rebuilt.
    """
    d = tuple(d)
    K = len(d)
    bad = []
    for i in range(1, K + 1):
        lead = leaders[i] if leaders else select_leaders(d, i)
        sent = transmitted_targets(i, d, t, lead)
        fake = Transmission(i, tuple(Codeword(i, A, b"") for A in sent))
        span = _CodewordSpan(fake, d)
        sent_set = set(sent)
        others = [x for x in range(1, K + 1) if x != i]
        for A in subsets(others, t):
            if A not in sent_set and span.combination(A) is None:
                bad.append((i, A))
    return bad


def zero_sum_violations(d: Sequence[int], t: int) -> list[tuple[int, Subset]]:
    """(i, C) with C a (t+1)-set of equal-demand users where XOR of Y^i_A over A in C fails to vanish."""
    d = tuple(d)
    K = len(d)
    bad = []
    for i in range(1, K + 1):
        others = [x for x in range(1, K + 1) if x != i]
        for C in subsets(others, t + 1):
            if len({d[c - 1] for c in C}) != 1:
                continue
            acc: set[SubPieceId] = set()
            for A in subsets(C, t):
                acc ^= set(codeword_terms(i, A, d))
            if acc:
                bad.append((i, C))
    return bad


@dataclass
class SimulationResult:
    params: SystemParams
    demand: Demand
    leaders: list[LeaderSet]
    transmissions: list[Transmission]
    decoded: list[bytes]
    traces: list[list[Recovery]]
    load: Fraction
    seed: int | None = None

    def transcript(self) -> dict:
        p = self.params
        return {
            "params": {
                "N": p.N,
                "K": p.K,
                "t": p.t,
                "M": frac_str(p.M),
                "F_bits": p.F,
                "subpiece_bits": 8 * p.subpiece_bytes,
                "seed": self.seed,
            },
            "demand": list(self.demand),
            "leaders": [list(ls.leaders) for ls in self.leaders],
            "codeword_counts": [len(x.codewords) for x in self.transmissions],
            "total_bits": sum(x.bits for x in self.transmissions),
            "load_exact": frac_str(self.load),
            "load_float": float12(self.load),
        }


def simulate(
    params: SystemParams,
    d: Sequence[int],
    seed: int = 0,
    library: FileLibrary | None = None,
    leaders: Mapping[int, LeaderSet] | None = None,
    corrupt_user: int | None = None,
) -> SimulationResult:
    """Place, encode, decode and check every user recovers its file exactly.

    ``corrupt_user`` flips one cached bit of that user before delivery (test hook).
    Raises :class:`DecodeMismatch` on any wrong output.
    """
    d = check_demand(d, params.N, params.K)
    if library is None:
        library = random_library(params, seed)
    caches = man_placement(params, library)
    if corrupt_user is not None:
        cache = caches[corrupt_user - 1]
        key = next(iter(sorted(cache.pieces)))
        data = bytearray(cache.pieces[key])
        data[0] ^= 1
        cache.pieces[key] = bytes(data)
    K = params.K
    lead = [leaders[i] if leaders else select_leaders(d, i) for i in range(1, K + 1)]
    txs = [encode_user(i, d, lead[i - 1], caches[i - 1]) for i in range(1, K + 1)]
    decoded, traces = [], []
    for k in range(1, K + 1):
        others = [x for x in txs if x.transmitter != k]
        out, trace = decode_user_traced(k, d, others, caches[k - 1])
        want = library[d[k - 1] - 1]
        if out != want:
            pos = next((j for j, (a, b) in enumerate(zip(out, want)) if a != b), min(len(out), len(want)))
            raise DecodeMismatch(
                f"user {k} decoded a wrong copy of file {d[k - 1]}",
                {"user": k, "demand": list(d), "t": params.t, "first_bad_byte": pos},
            )
        decoded.append(out)
        traces.append(trace)
    return SimulationResult(params, d, lead, txs, decoded, traces, measure_load(txs, params.F), seed)


def expected_codeword_count(d: Sequence[int], t: int, i: int) -> int:
    K = len(d)
    return binom(K - 1, t) - binom(K - 1 - n_distinct_excluding(d, i), t)
