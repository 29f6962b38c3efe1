"""Corpus ingestion: tokenization, rank-frequency tables, mixing, hapax structure.

A corpus is reduced to a :class:`TokenCounts` multiset (token -> occurrence
count), then ordered into a :class:`RankFrequency` table

    f_1 >= f_2 >= ... >= f_n,   sum_r f_r = 1,

where f_r = nu_r / N for integer occurrence counts nu_r.  The jump ranks
r_k (largest rank whose count is >= k+1) describe the staircase structure of
the low-frequency tail, and ``hapax_boundary`` locates the rank r_b from
which many types share one frequency.
"""

from __future__ import annotations

import json
import unicodedata
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

try:
    import regex as _regex
except ImportError:  # pragma: no cover - regex is a declared dependency
    _regex = None

__all__ = [
    "CorpusError",
    "TokenCounts",
    "RankFrequency",
    "JumpRanks",
    "read_text_utf8",
    "tokenize",
    "rank",
    "mix",
    "jump_ranks",
    "hapax_boundary",
    "range_mass",
]

MODES = ("character", "word")
FILTERS = ("han-only", "alphabetic-only", "none")

#: Default multiplicity threshold for the hapax boundary rank r_b: the
#: boundary is the first rank whose frequency is shared by more than this
#: many types.
RB_THRESHOLD = 10


class CorpusError(ValueError):
    """Raised for ingestion problems: bad UTF-8, empty corpora, mode mismatches."""


# --------------------------------------------------------------------------
# Types
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class TokenCounts:
    """Multiset of tokens for one corpus.

    Attributes:
        entries: token -> occurrence count (every count >= 1).
        N: total token count (sum of all counts).
        n: distinct token count (number of entries).
        mode: tokenization tag ``"<mode>:<filter>"``; corpora with different
            tags cannot be mixed.
    """

    entries: dict[str, int]
    N: int
    n: int
    mode: str

    @classmethod
    def from_entries(cls, entries: dict[str, int], mode: str) -> "TokenCounts":
        """Build from a raw token->count map, validating counts."""
        if not entries:
            raise CorpusError("empty corpus: no tokens survived tokenization")
        for token, count in entries.items():
            if count < 1 or count != int(count):
                raise CorpusError(
                    f"invalid count {count!r} for token {token!r}: must be a positive integer"
                )
        return cls(entries=dict(entries), N=sum(entries.values()),
                   n=len(entries), mode=mode)

    def to_json_dict(self) -> dict:
        """JSON-ready form: entries sorted by (count desc, token asc)."""
        ordered = sorted(self.entries.items(), key=lambda kv: (-kv[1], kv[0]))
        return {
            "mode": self.mode,
            "N": self.N,
            "n": self.n,
            "entries": [{"token": t, "count": c} for t, c in ordered],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), ensure_ascii=False, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "TokenCounts":
        obj = json.loads(text)
        entries = {e["token"]: int(e["count"]) for e in obj["entries"]}
        tc = cls.from_entries(entries, obj["mode"])
        if tc.N != obj["N"] or tc.n != obj["n"]:
            raise CorpusError(
                f"inconsistent serialized totals: N={obj['N']}, n={obj['n']} "
                f"vs recomputed N={tc.N}, n={tc.n}"
            )
        return tc


@dataclass(frozen=True)
class RankFrequency:
    """Ordered rank-frequency table f_1 >= ... >= f_n.

    ``freqs[r-1]`` is f_r and ``counts[r-1]`` the integer occurrence count
    nu_r; for tables built by :func:`rank`, f_r = nu_r / N exactly and the
    frequencies sum to 1.  Synthetic tables built by
    :meth:`from_frequencies` carry rounded counts and need not normalize.
    """

    freqs: np.ndarray
    counts: np.ndarray
    N: int
    n: int
    tokens: tuple[str, ...] | None = field(default=None, repr=False)

    def __post_init__(self):
        freqs = np.asarray(self.freqs, dtype=np.float64)
        counts = np.asarray(self.counts, dtype=np.int64)
        object.__setattr__(self, "freqs", freqs)
        object.__setattr__(self, "counts", counts)
        if freqs.ndim != 1 or freqs.size == 0:
            raise CorpusError("rank-frequency table must be a non-empty 1-D sequence")
        if freqs.size != self.n or counts.size != self.n:
            raise CorpusError(f"table length {freqs.size} != n = {self.n}")
        if np.any(freqs <= 0):
            raise CorpusError("all frequencies must be positive")
        if np.any(np.diff(freqs) > 0):
            raise CorpusError("frequencies must be non-increasing")

    @classmethod
    def from_frequencies(cls, freqs, N: int) -> "RankFrequency":
        """Synthetic table from a bare frequency sequence (counts rounded)."""
        freqs = np.asarray(freqs, dtype=np.float64)
        counts = np.rint(freqs * N).astype(np.int64)
        return cls(freqs=freqs, counts=counts, N=int(N), n=freqs.size)


@dataclass(frozen=True)
class JumpRanks:
    """Jump ranks r_k of a rank-frequency table.

    ``r(k)`` is the largest rank whose occurrence count is >= k+1 (0 if no
    such rank), so r_0 = n and r_k - r_{k+1} counts the types occurring
    exactly k+1 times.  ``ranks[k]`` stores r_k for k = 0 .. max count - 1;
    beyond the stored range every r_k is 0.
    """

    ranks: np.ndarray
    n: int

    def r(self, k: int) -> int:
        if k < 0:
            raise CorpusError(f"jump index k must be >= 0, got {k}")
        if k >= self.ranks.size:
            return 0
        return int(self.ranks[k])

    def __len__(self) -> int:
        return self.ranks.size


# --------------------------------------------------------------------------
# Ingestion and tokenization
# --------------------------------------------------------------------------

def read_text_utf8(path: str | Path) -> str:
    """Read a file as UTF-8, reporting the byte offset of any invalid data."""
    data = Path(path).read_bytes()
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise CorpusError(
            f"{path}: invalid UTF-8 at byte offset {exc.start}"
        ) from exc


if _regex is not None:
    _GRAPHEME_RE = _regex.compile(r"\X")
    _HAN_RE = _regex.compile(r"\p{Han}")

    def _graphemes(text: str) -> list[str]:
        return _GRAPHEME_RE.findall(text)

    def _is_han(cluster: str) -> bool:
        return bool(_HAN_RE.match(cluster))

else:  # pragma: no cover - fallback when the regex module is unavailable
    def _graphemes(text: str) -> list[str]:
        # Approximate clustering: fold combining marks into the previous
        # base character.  Sufficient for Han and alphabetic text.
        clusters: list[str] = []
        for ch in text:
            if clusters and unicodedata.combining(ch):
                clusters[-1] += ch
            else:
                clusters.append(ch)
        return clusters

    _HAN_RANGES = (
        (0x4E00, 0x9FFF), (0x3400, 0x4DBF), (0xF900, 0xFAFF),
        (0x20000, 0x2A6DF), (0x2A700, 0x2EBEF), (0x30000, 0x3134A),
    )

    def _is_han(cluster: str) -> bool:
        cp = ord(cluster[0])
        return any(lo <= cp <= hi for lo, hi in _HAN_RANGES)


def _is_alphabetic(cluster: str) -> bool:
    return cluster[0].isalpha()


def _passes(cluster: str, token_filter: str) -> bool:
    if token_filter == "han-only":
        return _is_han(cluster)
    if token_filter == "alphabetic-only":
        return _is_alphabetic(cluster)
    return True


def _word_tokens(text: str, token_filter: str) -> list[str]:
    tokens = []
    for raw in text.lower().split():
        # strip leading/trailing non-alphabetic marks (punctuation, quotes, digits)
        start, end = 0, len(raw)
        while start < end and not raw[start].isalpha():
            start += 1
        while end > start and not raw[end - 1].isalpha():
            end -= 1
        word = raw[start:end]
        if not word:
            continue
        if token_filter == "alphabetic-only" and not word.isalpha():
            continue
        if token_filter == "han-only" and not all(_is_han(ch) for ch in word):
            continue
        tokens.append(word)
    return tokens


def tokenize(text: str, mode: str = "character",
             token_filter: str = "han-only") -> TokenCounts:
    """Tokenize ``text`` and aggregate occurrence counts.

    Character mode emits one token per extended grapheme cluster passing the
    filter; word mode lowercases, splits on whitespace, strips
    leading/trailing non-alphabetic marks, and keeps surviving non-empty
    tokens.  The input is used as-is (no Unicode normalization), so
    identical byte sequences always produce identical tables.

    Args:
        text: decoded corpus text.
        mode: "character" or "word".
        token_filter: "han-only" keeps Han-script tokens, "alphabetic-only"
            keeps alphabetic tokens, "none" keeps everything.

    Raises:
        CorpusError: unknown mode/filter, or no token survives the filter.
    """
    if mode not in MODES:
        raise CorpusError(f"unknown mode {mode!r}: expected one of {MODES}")
    if token_filter not in FILTERS:
        raise CorpusError(
            f"unknown filter {token_filter!r}: expected one of {FILTERS}"
        )

    if mode == "character":
        tokens = [g for g in _graphemes(text) if _passes(g, token_filter)]
    else:
        tokens = _word_tokens(text, token_filter)

    entries: dict[str, int] = {}
    for tok in tokens:
        entries[tok] = entries.get(tok, 0) + 1
    if not entries:
        raise CorpusError(
            f"empty corpus: no tokens survived tokenization "
            f"(mode={mode!r}, filter={token_filter!r})"
        )
    return TokenCounts.from_entries(entries, mode=f"{mode}:{token_filter}")


# --------------------------------------------------------------------------
# Ranking and mixing
# --------------------------------------------------------------------------

def rank(tc: TokenCounts) -> RankFrequency:
    """Order a token multiset into a rank-frequency table.

    Frequencies are sorted descending; ties are broken by lexicographic
    token order so ranking is deterministic across runs.
    """
    ordered = sorted(tc.entries.items(), key=lambda kv: (-kv[1], kv[0]))
    tokens = tuple(t for t, _ in ordered)
    counts = np.array([c for _, c in ordered], dtype=np.int64)
    freqs = counts / float(tc.N)
    return RankFrequency(freqs=freqs, counts=counts, N=tc.N, n=tc.n,
                         tokens=tokens)


def mix(a: TokenCounts, b: TokenCounts) -> TokenCounts:
    """Concatenate two corpora by adding counts token-wise.

    The mixed frequencies satisfy
    f_k(A&B) = (N_A f_k(A) + N_B f_k(B)) / (N_A + N_B).
    """
    if a.mode != b.mode:
        raise CorpusError(
            f"cannot mix corpora with different modes: {a.mode!r} vs {b.mode!r}"
        )
    entries = dict(a.entries)
    for token, count in b.entries.items():
        entries[token] = entries.get(token, 0) + count
    return TokenCounts.from_entries(entries, mode=a.mode)


# --------------------------------------------------------------------------
# Hapax structure
# --------------------------------------------------------------------------

def jump_ranks(rf: RankFrequency) -> JumpRanks:
    """Extract the jump ranks r_k = largest rank with count >= k+1.

    The full spectrum k = 0 .. max(count)-1 is materialized; r_0 = n and
    the difference r_k - r_{k+1} equals the number of types occurring
    exactly k+1 times.
    """
    counts = rf.counts
    if np.any(counts < 1):
        raise CorpusError("jump ranks require integer counts >= 1 at every rank")
    ascending = counts[::-1]  # counts sorted ascending
    kmax = int(counts[0])
    thresholds = np.arange(1, kmax + 1, dtype=np.int64)
    # ranks[k] = #{counts >= k+1}; counts < k+1 is counts <= k for integers
    ranks = rf.n - np.searchsorted(ascending, thresholds - 1, side="right")
    return JumpRanks(ranks=ranks.astype(np.int64), n=rf.n)


def hapax_boundary(rf: RankFrequency, threshold: int = RB_THRESHOLD) -> int | None:
    """Locate the hapax boundary rank r_b.

    Returns the smallest rank whose frequency is shared by more than
    ``threshold`` types, or None when no frequency is that degenerate
    (tables print "-" in that case).
    """
    if threshold < 1:
        raise CorpusError(f"threshold must be >= 1, got {threshold}")
    counts = rf.counts
    # boundaries of equal-count runs in the descending table
    change = np.flatnonzero(np.diff(counts) != 0)
    starts = np.concatenate(([0], change + 1))
    ends = np.concatenate((change + 1, [counts.size]))
    sizes = ends - starts
    qualifying = np.flatnonzero(sizes > threshold)
    if qualifying.size == 0:
        return None
    return int(starts[qualifying[0]]) + 1  # ranks are 1-based


def range_mass(rf: RankFrequency, lo: int, hi: int) -> float:
    """Total frequency mass carried by ranks lo..hi inclusive."""
    if not (1 <= lo <= hi <= rf.n):
        raise CorpusError(
            f"rank range [{lo}, {hi}] out of bounds for table with n={rf.n}"
        )
    return float(np.sum(rf.freqs[lo - 1:hi]))
