"""kinetutor: a Socratic kinematics tutor steered by a genetic algorithm.

Chromosome bitstrings decode into (object, equation, variable, zone)
question pointers; student answers accumulate as knowns that lower
chromosome fitness; equations one variable short of fully known produce
solve advice, until the quantity the problem asked for is in hand.
"""

from .domain import (
    EquationDomain,
    EquationSpec,
    KnownEntry,
    KnownsStore,
    ObjectRegistry,
    QuadTuple,
    VariableSpec,
    ZoneRegistry,
)
from .fitness import FitnessReport, fitness, fitness_list, max_fitness
from .genome import (
    Chromosome,
    GaConfig,
    Population,
    crossover,
    decode_tuple,
    encode_tuple,
    export_bitstream,
    ga_step,
    init_population,
    mutate,
    roulette_select,
)
from .metrics import RunMetrics, compare, compute
from .questions import Answer, Prompt, SessionStores, process_tuple, render_caution
from .scripted import ProblemScript, ScriptedStudent, load_script
from .session import (
    SessionState,
    TargetSpec,
    new_session,
    run_session,
    save_snapshot,
    session_program,
)

__version__ = "0.1.0"

__all__ = [
    "Answer",
    "Chromosome",
    "EquationDomain",
    "EquationSpec",
    "FitnessReport",
    "GaConfig",
    "KnownEntry",
    "KnownsStore",
    "ObjectRegistry",
    "Population",
    "ProblemScript",
    "Prompt",
    "QuadTuple",
    "RunMetrics",
    "ScriptedStudent",
    "SessionState",
    "SessionStores",
    "TargetSpec",
    "VariableSpec",
    "ZoneRegistry",
    "compare",
    "compute",
    "crossover",
    "decode_tuple",
    "encode_tuple",
    "export_bitstream",
    "fitness",
    "fitness_list",
    "ga_step",
    "init_population",
    "load_script",
    "max_fitness",
    "mutate",
    "new_session",
    "process_tuple",
    "render_caution",
    "roulette_select",
    "run_session",
    "save_snapshot",
    "session_program",
]
