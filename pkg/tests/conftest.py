from __future__ import annotations

from pathlib import Path

import pytest

from kinetutor.domain import EquationDomain
from kinetutor.questions import Answer, NONE, SessionStores

CAR_PROBLEM = Path(__file__).resolve().parents[1] / "src" / "kinetutor" / "data" / "problems" / "car_stoplight.json"


@pytest.fixture(scope="session")
def domain() -> EquationDomain:
    return EquationDomain.load()


@pytest.fixture
def stores(domain) -> SessionStores:
    return SessionStores(domain=domain)


@pytest.fixture(scope="session")
def car_problem_path() -> Path:
    return CAR_PROBLEM


class QueuedIO:
    """Feeds a fixed answer sequence; fails loudly on surplus prompts.

    Queue items: a str becomes a free-text answer, a bool a yes/no answer.
    """

    def __init__(self, answers=()):
        self.queue = list(answers)
        self.prompts = []
        self.notices = []

    def exchange(self, prompt) -> Answer:
        self.prompts.append(prompt)
        assert self.queue, f"unexpected prompt {prompt.kind!r}: {prompt.text}"
        item = self.queue.pop(0)
        if isinstance(item, bool):
            return Answer(prompt=prompt, text="yes" if item else "no", affirmative=item)
        return Answer(prompt=prompt, text=item)

    def notify(self, prompt) -> None:
        self.notices.append(prompt)


class SilentIO(QueuedIO):
    """Asserts that nothing is ever asked."""

    def exchange(self, prompt):
        raise AssertionError(f"prompt was issued: {prompt.kind!r}: {prompt.text}")


def drive_generator(generator, io):
    """Pump any prompt generator against a QueuedIO; returns its value."""
    try:
        prompt = next(generator)
        while True:
            if prompt.expected == NONE:
                io.notify(prompt)
                prompt = generator.send(None)
            else:
                prompt = generator.send(io.exchange(prompt))
    except StopIteration as stop:
        return stop.value
