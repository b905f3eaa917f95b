"""Chromosome representation and the genetic-algorithm operators.

A chromosome is a fixed-length bitstring made of 12-bit groups; each group
decodes into a (n, e, v, z) tuple via four 3-bit fields, most significant
bit first. The GA itself is deliberately plain: roulette selection weighted
by reciprocal fitness, single-point crossover, independent per-bit mutation.

All randomness flows through one numpy Generator per session, consumed in a
fixed order (initial bits; then per child pair: parent indices, crossover
decision, crossover point, mutation mask for each child) so any run can be
replayed exactly from its seed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .domain import FIELD_BITS, TUPLE_BITS, QuadTuple

GA_MODE = "ga"
RANDOM_CONTROL_MODE = "random-control"


class InvalidConfigError(ValueError):
    pass


class EmptyPopulationError(ValueError):
    pass


class LengthMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class GaConfig:
    population_size: int = 50
    chromosome_bits: int = 12000
    crossover_probability: float = 0.25
    mutation_probability_per_bit: float = 0.01
    max_generations: int = 500
    mode: str = GA_MODE

    def __post_init__(self) -> None:
        if self.population_size < 2:
            raise InvalidConfigError("population_size must be at least 2")
        if self.chromosome_bits <= 0 or self.chromosome_bits % TUPLE_BITS:
            raise InvalidConfigError(
                f"chromosome_bits must be a positive multiple of {TUPLE_BITS}"
            )
        for name in ("crossover_probability", "mutation_probability_per_bit"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise InvalidConfigError(f"{name} must lie in [0, 1]")
        if self.max_generations < 0:
            raise InvalidConfigError("max_generations must be >= 0")
        if self.mode not in (GA_MODE, RANDOM_CONTROL_MODE):
            raise InvalidConfigError(f"unknown mode {self.mode!r}")

    @property
    def tuples_per_chromosome(self) -> int:
        return self.chromosome_bits // TUPLE_BITS


class Chromosome:
    """Immutable bitstring whose length is a multiple of 12."""

    __slots__ = ("_bits", "_decoded")

    def __init__(self, bits: Sequence[int] | np.ndarray):
        arr = np.asarray(bits, dtype=np.uint8)
        if arr.ndim != 1 or arr.size == 0 or arr.size % TUPLE_BITS:
            raise ValueError(f"chromosome length must be a positive multiple of {TUPLE_BITS}")
        if not np.all((arr == 0) | (arr == 1)):
            raise ValueError("chromosome bits must be 0 or 1")
        arr.setflags(write=False)
        self._bits = arr
        self._decoded: np.ndarray | None = None

    @classmethod
    def random(cls, n_bits: int, rng: np.random.Generator) -> "Chromosome":
        return cls(rng.integers(0, 2, size=n_bits, dtype=np.uint8))

    @classmethod
    def from_string(cls, text: str) -> "Chromosome":
        return cls([int(c) for c in text if c in "01"])

    @classmethod
    def from_tuples(cls, tuples: Iterable[tuple[int, int, int, int]]) -> "Chromosome":
        bits: list[int] = []
        for quad in tuples:
            bits.extend(encode_tuple(*quad))
        return cls(bits)

    @property
    def bits(self) -> np.ndarray:
        return self._bits

    @property
    def bit_length(self) -> int:
        return int(self._bits.size)

    @property
    def tuple_count(self) -> int:
        return self.bit_length // TUPLE_BITS

    def decoded(self) -> np.ndarray:
        """All groups decoded at once: shape (tuple_count, 4), columns n,e,v,z."""
        if self._decoded is None:
            groups = self._bits.reshape(-1, 4, FIELD_BITS).astype(np.int64)
            weights = 2 ** np.arange(FIELD_BITS - 1, -1, -1)
            decoded = groups @ weights
            decoded.setflags(write=False)
            self._decoded = decoded
        return self._decoded

    def to01(self) -> str:
        return "".join("1" if b else "0" for b in self._bits)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Chromosome):
            return NotImplemented
        return self._bits.shape == other._bits.shape and bool(np.all(self._bits == other._bits))

    def __repr__(self) -> str:
        return f"Chromosome({self.bit_length} bits)"


def encode_tuple(n: int, e: int, v: int, z: int) -> list[int]:
    """12 bits for one (n, e, v, z) group, each field 3 bits MSB-first."""
    bits: list[int] = []
    for value in (n, e, v, z):
        if not 0 <= value <= (1 << FIELD_BITS) - 1:
            raise ValueError(f"tuple field {value} does not fit {FIELD_BITS} bits")
        bits.extend((value >> shift) & 1 for shift in range(FIELD_BITS - 1, -1, -1))
    return bits


def decode_tuple(chromosome: Chromosome, group_index: int) -> QuadTuple:
    """Decode the ``group_index``-th 12-bit group into its (n, e, v, z) tuple."""
    if not 0 <= group_index < chromosome.tuple_count:
        raise IndexError(f"group index {group_index} out of range")
    n, e, v, z = (int(x) for x in chromosome.decoded()[group_index])
    return QuadTuple(n, e, v, z)


@dataclass
class Population:
    members: list[Chromosome]
    generation: int = 1
    rng_seed: int = 0

    def __post_init__(self) -> None:
        lengths = {m.bit_length for m in self.members}
        if len(lengths) > 1:
            raise LengthMismatchError("population members differ in bit length")

    def __len__(self) -> int:
        return len(self.members)


def init_population(config: GaConfig, seed: int, rng: np.random.Generator | None = None) -> Population:
    """Fresh uniformly random population. Pass the session RNG to keep a
    single stream per run; otherwise a new generator is built from ``seed``."""
    if rng is None:
        rng = np.random.default_rng(seed)
    members = [Chromosome.random(config.chromosome_bits, rng) for _ in range(config.population_size)]
    return Population(members=members, generation=1, rng_seed=seed)


def selection_weights(fitness_list: Sequence[int]) -> np.ndarray:
    """Reciprocal-fitness weights: lower fitness selects more often.

    Fitness values are floored at 1 to keep the reciprocal finite.
    """
    fits = np.asarray(fitness_list, dtype=np.float64)
    if np.any(fits < 0):
        raise ValueError("fitness values must be non-negative")
    return 1.0 / np.maximum(fits, 1.0)


def roulette_select(
    population: Population, fitness_list: Sequence[int], rng: np.random.Generator
) -> tuple[int, int]:
    """Two member indices (repeats allowed), odds proportional to 1/fitness."""
    if len(population) == 0:
        raise EmptyPopulationError("cannot select from an empty population")
    if len(fitness_list) != len(population):
        raise ValueError("fitness list does not align with population members")
    weights = selection_weights(fitness_list)
    probs = weights / weights.sum()
    first, second = rng.choice(len(population), size=2, replace=True, p=probs)
    return int(first), int(second)


def single_point_swap(
    bits_a: np.ndarray, bits_b: np.ndarray, point: int
) -> tuple[np.ndarray, np.ndarray]:
    """Swap everything from ``point`` to the end between two bit arrays."""
    if bits_a.shape != bits_b.shape:
        raise LengthMismatchError("cannot cross over bitstrings of different lengths")
    if not 0 <= point <= bits_a.size:
        raise ValueError(f"crossover point {point} out of range")
    child_a = np.concatenate([bits_a[:point], bits_b[point:]])
    child_b = np.concatenate([bits_b[:point], bits_a[point:]])
    return child_a, child_b


def crossover(
    a: Chromosome, b: Chromosome, rng: np.random.Generator, probability: float
) -> tuple[Chromosome, Chromosome]:
    """Single-point crossover with the given probability, else verbatim copies.

    The point is uniform over the closed range [0, length], so both the
    full swap and the no-op are reachable outcomes.
    """
    if a.bit_length != b.bit_length:
        raise LengthMismatchError("cannot cross over chromosomes of different lengths")
    if rng.random() < probability:
        point = int(rng.integers(0, a.bit_length + 1))
        bits_a, bits_b = single_point_swap(a.bits, b.bits, point)
        return Chromosome(bits_a), Chromosome(bits_b)
    return Chromosome(a.bits.copy()), Chromosome(b.bits.copy())


def mutate(c: Chromosome, rng: np.random.Generator, probability_per_bit: float) -> Chromosome:
    """Flip each bit independently with the given probability."""
    if not 0.0 <= probability_per_bit <= 1.0:
        raise ValueError("mutation probability must lie in [0, 1]")
    mask = rng.random(c.bit_length) < probability_per_bit
    if not mask.any():
        return Chromosome(c.bits.copy())
    flipped = c.bits.copy()
    flipped[mask] ^= 1
    return Chromosome(flipped)


def ga_step(
    population: Population,
    fitness_list: Sequence[int],
    config: GaConfig,
    rng: np.random.Generator,
) -> Population:
    """Produce the next generation.

    In "ga" mode: sort by fitness, then repeatedly roulette-select a pair,
    cross over, mutate, and keep both children until the population is
    refilled (one overflow child is dropped for odd sizes). In
    "random-control" mode the next generation is freshly uniform random;
    it serves as the baseline that evolves nothing.
    """
    if len(fitness_list) != len(population):
        raise ValueError("fitness list does not align with population members")
    size = len(population)
    if config.mode == RANDOM_CONTROL_MODE:
        members = [Chromosome.random(config.chromosome_bits, rng) for _ in range(size)]
        return Population(members=members, generation=population.generation + 1,
                          rng_seed=population.rng_seed)

    order = sorted(range(size), key=lambda i: fitness_list[i])
    ranked_members = [population.members[i] for i in order]
    ranked_fits = [fitness_list[i] for i in order]
    ranked = Population(members=ranked_members, generation=population.generation,
                        rng_seed=population.rng_seed)

    children: list[Chromosome] = []
    while len(children) < size:
        i, j = roulette_select(ranked, ranked_fits, rng)
        first, second = crossover(ranked_members[i], ranked_members[j], rng,
                                  config.crossover_probability)
        children.append(mutate(first, rng, config.mutation_probability_per_bit))
        children.append(mutate(second, rng, config.mutation_probability_per_bit))
    del children[size:]
    return Population(members=children, generation=population.generation + 1,
                      rng_seed=population.rng_seed)


def export_bitstream(population: Population, destination) -> int:
    """Write all members' bits, concatenated and packed MSB-first, 8 per byte.

    ``destination`` may be a path or a binary file object. Returns the byte
    count written. The final byte is zero-padded when the total bit count is
    not a multiple of 8.
    """
    if population.members:
        all_bits = np.concatenate([m.bits for m in population.members])
        payload = np.packbits(all_bits).tobytes()
    else:
        payload = b""
    if hasattr(destination, "write"):
        destination.write(payload)
    else:
        with open(destination, "wb") as fh:
            fh.write(payload)
    return len(payload)
