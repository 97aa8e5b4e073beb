"""Synthetic repetitive corpora: a random base followed by mutated copies."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DNA = b"ACGT"


@dataclass(frozen=True)
class CorpusSpec:
    base_size: int
    copies: int
    mutation_rate: float = 0.0
    seed: int = 0
    alphabet: bytes = DNA
    substitutions: int | None = None  # exact count per copy, overrides mutation_rate
    indel_rate: float = 0.0


def _mutate(rng: np.random.Generator, base: np.ndarray, spec: CorpusSpec, symbols: np.ndarray) -> np.ndarray:
    copy = base.copy()
    if spec.substitutions is not None:
        where = rng.choice(base.size, size=min(spec.substitutions, base.size), replace=False)
    else:
        where = np.flatnonzero(rng.random(base.size) < spec.mutation_rate)
    if where.size:
        # shift by a nonzero amount so every substitution changes the symbol
        shift = rng.integers(1, max(2, symbols.size), size=where.size)
        idx = np.searchsorted(symbols, copy[where])
        copy[where] = symbols[(idx + shift) % symbols.size]
    if spec.indel_rate > 0:
        hits = np.flatnonzero(rng.random(copy.size) < spec.indel_rate)
        if hits.size:
            inserts = rng.random(hits.size) < 0.5
            keep = np.ones(copy.size, dtype=np.bool_)
            keep[hits[~inserts]] = False
            out = []
            prev = 0
            for h in hits[inserts]:
                out.append(copy[prev:h][keep[prev:h]])
                out.append(symbols[rng.integers(symbols.size, size=1)])
                prev = h
            out.append(copy[prev:][keep[prev:]])
            copy = np.concatenate(out)
    return copy


def generate(spec: CorpusSpec) -> bytes:
    """Base string of ``base_size`` symbols followed by ``copies - 1`` mutated copies."""
    if spec.base_size < 1 or spec.copies < 1:
        raise ValueError("base_size and copies must be at least 1")
    if not 0.0 <= spec.mutation_rate <= 1.0:
        raise ValueError("mutation_rate must lie in [0, 1]")
    symbols = np.array(sorted(set(spec.alphabet)), dtype=np.uint8)
    rng = np.random.default_rng(spec.seed)
    base = symbols[rng.integers(symbols.size, size=spec.base_size)]
    parts = [base]
    for _ in range(spec.copies - 1):
        parts.append(_mutate(rng, base, spec, symbols))
    return np.concatenate(parts).tobytes()


def generate_corpus(base_size: int, copies: int, mutation_rate: float = 0.0, seed: int = 0, **kw) -> bytes:
    return generate(CorpusSpec(base_size, copies, mutation_rate, seed, **kw))
