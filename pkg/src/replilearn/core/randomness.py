"""Deterministic shared randomness with named substreams.

A ``SharedRandomness`` is a (root seed, path) pair.  Every pair maps to a
128-bit key through BLAKE2b, and the key defines an infinite stream of 64-bit
words in counter mode, so word ``j`` can be read without touching words
``0..j-1``.  Bulk sampling (multinomials, gamma spacings, permutations) goes
through a Philox generator keyed by the same 128 bits.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_MASK64 = (1 << 64) - 1
_INV53 = 1.0 / (1 << 53)


def _mix64(z: np.ndarray) -> np.ndarray:
    # splitmix64 finalizer; numpy uint64 arithmetic wraps modulo 2**64
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def _encode(root_seed: int, path: Sequence[tuple[str, int]]) -> bytes:
    parts = [f"{root_seed & _MASK64:d}"]
    for label, index in path:
        parts.append(f"{label}:{index:d}")
    return "/".join(parts).encode("utf-8")


def derive_key(root_seed: int, path: Sequence[tuple[str, int]]) -> tuple[int, int]:
    digest = hashlib.blake2b(_encode(root_seed, path), digest_size=16).digest()
    return int.from_bytes(digest[:8], "little"), int.from_bytes(digest[8:], "little")


def _mix64_int(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def word_at(key: tuple[int, int], j: int) -> int:
    """Scalar version of :func:`words_for_keys` for a single position."""
    ctr = (key[0] + (j + 1) * 0x9E3779B97F4A7C15) & _MASK64
    return _mix64_int(_mix64_int(ctr) ^ key[1])


def words_for_keys(keys: np.ndarray, start: int, count: int) -> np.ndarray:
    """Counter-mode words ``start .. start+count-1`` for each row of ``keys``.

    ``keys`` is an ``(N, 2)`` uint64 array; the result has shape ``(N, count)``.
    """
    keys = np.asarray(keys, dtype=np.uint64).reshape(-1, 2)
    j = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        ctr = keys[:, :1] + j[None, :] * _GAMMA
        return _mix64(_mix64(ctr) ^ keys[:, 1:2])


def words_to_uniform(words: np.ndarray) -> np.ndarray:
    return (words >> np.uint64(11)).astype(np.float64) * _INV53


def _parse_parts(parts: Iterable[str | int]) -> list[tuple[str, int]]:
    out: list[tuple[str, int]] = []
    open_label = False
    for part in parts:
        if isinstance(part, str):
            out.append((part, 0))
            open_label = True
        elif isinstance(part, (int, np.integer)) and not isinstance(part, bool):
            if open_label:
                out[-1] = (out[-1][0], int(part))
            else:
                out.append(("", int(part)))
            open_label = False
        else:
            raise TypeError(f"substream part must be str or int, got {type(part).__name__}")
    return out


@dataclass(frozen=True)
class SharedRandomness:
    """A named, reproducible stream of uniform 64-bit words."""

    root_seed: int
    path: tuple[tuple[str, int], ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "root_seed", int(self.root_seed) & _MASK64)
        object.__setattr__(self, "path", tuple((str(a), int(b)) for a, b in self.path))

    def child(self, label: str, index: int = 0) -> "SharedRandomness":
        return SharedRandomness(self.root_seed, self.path + ((label, int(index)),))

    def substream(self, *parts: str | int) -> "SharedRandomness":
        """Extend the path, e.g. ``substream("alg2", "run", 3)``.

        Strings open a new path element; an integer directly after a string
        becomes that element's index.
        """
        return SharedRandomness(self.root_seed, self.path + tuple(_parse_parts(parts)))

    @property
    def key(self) -> tuple[int, int]:
        k = self.__dict__.get("_key")
        if k is None:
            k = derive_key(self.root_seed, self.path)
            object.__setattr__(self, "_key", k)
        return k

    def key_array(self) -> np.ndarray:
        return np.array(self.key, dtype=np.uint64)

    def words(self, count: int, start: int = 0) -> np.ndarray:
        return words_for_keys(self.key_array()[None, :], start, count)[0]

    def uniforms(self, count: int, start: int = 0) -> np.ndarray:
        return words_to_uniform(self.words(count, start))

    def uniform(self, low: float = 0.0, high: float = 1.0, position: int = 0) -> float:
        u = (word_at(self.key, position) >> 11) * _INV53
        return low + (high - low) * u

    def generator(self) -> np.random.Generator:
        k0, k1 = self.key
        return np.random.Generator(np.random.Philox(key=k0 | (k1 << 64)))

    def describe(self) -> str:
        return _encode(self.root_seed, self.path).decode("utf-8")


def keys_of(streams: Sequence[SharedRandomness]) -> np.ndarray:
    return np.array([s.key for s in streams], dtype=np.uint64).reshape(-1, 2)
