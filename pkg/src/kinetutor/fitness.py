"""Chromosome fitness: maximal starting value minus known-entry matches.

Every chromosome starts from a worst-case fitness (tuple count times the
largest equation's variable count). Each 12-bit group with an in-range
(equation, variable) pair then subtracts the number of known entries that
share its (object, equation, zone) — the known's own variable is
deliberately ignored. Groups whose (e, v) is out of range subtract nothing,
which penalizes them by forfeiting the reduction. Lower is fitter.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domain import EquationDomain, FIELD_MAX, KnownsStore
from .genome import Chromosome, GaConfig, Population


class MalformedChromosomeError(ValueError):
    pass


@dataclass(frozen=True)
class FitnessReport:
    value: int
    max_value: int
    matched_counts: tuple[int, ...]


def max_fitness(config: GaConfig, domain: EquationDomain) -> int:
    """Worst-case fitness: every group assumed to carry the biggest equation."""
    return config.tuples_per_chromosome * domain.max_var_count


def validity_table(domain: EquationDomain) -> np.ndarray:
    """Boolean table over all 3-bit (e, v) pairs: True where both are in range."""
    table = np.zeros((FIELD_MAX + 1, FIELD_MAX + 1), dtype=bool)
    for e in range(FIELD_MAX + 1):
        for v in range(FIELD_MAX + 1):
            table[e, v] = domain.is_valid_ev(e, v)
    return table


def known_counts_cube(knowns: KnownsStore) -> np.ndarray:
    """Entry counts indexed [object, eqn, zone], ignoring the known variable."""
    cube = np.zeros((FIELD_MAX + 1,) * 3, dtype=np.int64)
    for entry in knowns:
        cube[entry.object, entry.eqn, entry.zone] += 1
    return cube


def _matched_counts(
    chromosome: Chromosome, cube: np.ndarray, valid: np.ndarray
) -> np.ndarray:
    decoded = chromosome.decoded()
    n, e, v, z = decoded[:, 0], decoded[:, 1], decoded[:, 2], decoded[:, 3]
    counts = cube[n, e, z]
    return np.where(valid[e, v], counts, 0)


def fitness(
    chromosome: Chromosome,
    knowns: KnownsStore,
    config: GaConfig,
    domain: EquationDomain,
) -> FitnessReport:
    if chromosome.bit_length != config.chromosome_bits:
        raise MalformedChromosomeError(
            f"chromosome has {chromosome.bit_length} bits, config expects {config.chromosome_bits}"
        )
    counts = _matched_counts(chromosome, known_counts_cube(knowns), validity_table(domain))
    top = max_fitness(config, domain)
    return FitnessReport(
        value=int(top - counts.sum()),
        max_value=top,
        matched_counts=tuple(int(c) for c in counts),
    )


def fitness_list(
    population: Population,
    knowns: KnownsStore,
    config: GaConfig,
    domain: EquationDomain,
) -> list[int]:
    """Fitness values for every member, sharing one counts lookup."""
    cube = known_counts_cube(knowns)
    valid = validity_table(domain)
    top = max_fitness(config, domain)
    values = []
    for member in population.members:
        if member.bit_length != config.chromosome_bits:
            raise MalformedChromosomeError("population member length does not match config")
        values.append(int(top - _matched_counts(member, cube, valid).sum()))
    return values
