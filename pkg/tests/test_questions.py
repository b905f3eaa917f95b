from __future__ import annotations

import pytest

from conftest import QueuedIO, SilentIO, drive_generator

from kinetutor.domain import KnownEntry, QuadTuple, SameVariableError
from kinetutor.questions import (
    CAUTION_CONFIRM,
    KNOW_VARIABLE,
    MORE_OBJECTS,
    NEW_OBJECT,
    SOLVE_ADVICE,
    ZONE_DESCRIPTION,
    UnknownObjectError,
    UnknownZoneError,
    detect_solvable,
    process_tuple,
    render_caution,
)


def run_tuple(t, stores, io):
    return drive_generator(process_tuple(QuadTuple(*t), stores), io)


def seed_car(stores, zone=1, close=True):
    """Registered car at object 1 with one known: a = 5 m/s^2 via eqn 2."""
    stores.objects.register(1, "the car")
    if close:
        stores.objects.close()
    stores.zones.register(1, zone, "accelerating away from the traffic light")
    entry = KnownEntry(1, 2, 3, zone, "5 m/s^2", "student")
    stores.knowns.add(entry)
    return entry


class TestRejectionRuleOrder:
    """Curated (tuple, store-state) cases: each rule fires exactly in order."""

    def test_rule1_known_tuple_skipped_silently(self, stores):
        seed_car(stores)
        outcome = run_tuple((1, 2, 3, 1), stores, SilentIO())
        assert outcome.status == "rejected" and outcome.rule == 1

    def test_rule2_question_then_stop_question_closes_registry(self, stores):
        io = QueuedIO(["a car", False, "no"])
        outcome = run_tuple((2, 1, 1, 0), stores, io)
        # the object question, the stop question, then the variable question
        assert [p.kind for p in io.prompts] == [NEW_OBJECT, MORE_OBJECTS, KNOW_VARIABLE]
        assert io.prompts[0].text == "Do you see any objects in the problem?"
        assert io.prompts[1].text == "Do you see any more objects in this problem?"
        assert stores.objects.description(2) == "a car"
        assert stores.objects.closed
        assert outcome.status == "declined"  # the student answered "no" to the variable

    def test_rule2_closed_registry_rejects_unregistered_objects(self, stores):
        seed_car(stores)
        outcome = run_tuple((5, 1, 1, 0), stores, SilentIO())
        assert outcome.status == "rejected" and outcome.rule == 2

    def test_rule2_fires_before_rule3(self, stores):
        # invalid equation AND unregistered object, registry closed: rule 2 wins
        seed_car(stores)
        outcome = run_tuple((5, 7, 7, 0), stores, SilentIO())
        assert outcome.rule == 2

    def test_rule2_object_question_asked_even_for_invalid_equation(self, stores):
        # open registry: the object question happens before (e, v) validation
        io = QueuedIO(["a truck", False])
        outcome = run_tuple((3, 7, 7, 0), stores, io)
        assert [p.kind for p in io.prompts] == [NEW_OBJECT, MORE_OBJECTS]
        assert outcome.status == "rejected" and outcome.rule == 3

    @pytest.mark.parametrize("tup", [(1, 0, 1, 0), (1, 5, 1, 0), (1, 4, 1, 0)])
    def test_rule3_equation_out_of_range(self, stores, tup):
        seed_car(stores)
        outcome = run_tuple(tup, stores, SilentIO())
        assert outcome.status == "rejected" and outcome.rule == 3

    @pytest.mark.parametrize("tup", [(1, 2, 0, 0), (1, 2, 5, 0), (1, 3, 4, 0), (1, 1, 6, 0)])
    def test_rule3_variable_out_of_range(self, stores, tup):
        seed_car(stores)
        outcome = run_tuple(tup, stores, SilentIO())
        assert outcome.status == "rejected" and outcome.rule == 3

    def test_rule3_fires_before_rule4_no_zone_question(self, stores):
        # valid object, invalid variable, unregistered zone: no prompts at all
        seed_car(stores)
        outcome = run_tuple((1, 2, 5, 6), stores, SilentIO())
        assert outcome.rule == 3

    def test_rule4_zone_question_registers_and_inserts(self, stores):
        stores.objects.register(1, "the car")
        stores.objects.close()
        io = QueuedIO(["5 m/s^2", "accelerating away from the light"])
        outcome = run_tuple((1, 2, 3, 1), stores, io)
        assert [p.kind for p in io.prompts] == [KNOW_VARIABLE, ZONE_DESCRIPTION]
        assert "which you said was 5 m/s^2" in io.prompts[1].text
        assert stores.zones.description(1, 1) == "accelerating away from the light"
        assert outcome.status == "answered"
        assert stores.knowns.get((1, 2, 3, 1)).provenance == "student"

    def test_rule5_shared_variable_propagation(self, stores):
        stores.objects.register(1, "the car")
        stores.objects.close()
        io = QueuedIO(["0 m/s", "accelerating away from the light"])
        # v0x via equation 2 position 2; equation 1 holds it at position 3
        outcome = run_tuple((1, 2, 2, 1), stores, io)
        assert outcome.status == "answered"
        propagated = stores.knowns.get((1, 1, 3, 1))
        assert propagated is not None
        assert propagated.provenance == "shared-propagation"
        assert propagated.response == "0 m/s"

    def test_rule6_solvable_detection_follows_insertion(self, stores, domain):
        stores.objects.register(1, "the car")
        stores.objects.close()
        stores.zones.register(1, 0, "rolling downhill")
        for position, value in ((2, "0 m"), (3, "2 m/s"), (4, "6 s")):
            stores.knowns.add(KnownEntry(1, 1, position, 0, value, "student"))
        io = QueuedIO(["1 m/s^2", True, True, True])
        outcome = run_tuple((1, 1, 5, 0), stores, io)
        assert outcome.status == "answered"
        solved = stores.knowns.get((1, 1, 1, 0))
        assert solved is not None
        assert solved.provenance == "solved-algebraically"
        assert solved.response == "solved from equation 1, zone 0"
        advice = [p for p in io.notices if p.kind == SOLVE_ADVICE]
        assert advice and "solve it for" in advice[0].text

    def test_no_store_mutation_on_rejection(self, stores):
        entry = seed_car(stores)
        before = (len(stores.knowns), dict(stores.objects.entries), dict(stores.zones.entries))
        for tup in [(1, 2, 3, 1), (6, 1, 1, 0), (1, 7, 1, 0)]:
            run_tuple(tup, stores, SilentIO())
        after = (len(stores.knowns), dict(stores.objects.entries), dict(stores.zones.entries))
        assert before == after
        assert stores.knowns.get(entry.key) == entry


class TestKnowVariableFlow:
    def test_negative_answer_declines_without_insertion(self, stores):
        seed_car(stores)
        io = QueuedIO(["no"])
        outcome = run_tuple((1, 3, 1, 5), stores, io)
        assert outcome.status == "declined"
        assert len(stores.knowns) == 1

    def test_declined_question_not_repeated_within_generation(self, stores):
        seed_car(stores)
        io = QueuedIO(["no"])
        assert run_tuple((1, 3, 1, 5), stores, io).status == "declined"
        # same variable through a different equation, still unzoned: silent
        outcome = run_tuple((1, 1, 4, 6), stores, SilentIO())
        assert outcome.status == "declined"
        # a fresh generation clears the memory and asks again
        stores.declined.clear()
        io2 = QueuedIO(["no"])
        assert run_tuple((1, 3, 1, 5), stores, io2).status == "declined"
        assert len(io2.prompts) == 1

    def test_question_text_uses_description(self, stores, domain):
        seed_car(stores)
        io = QueuedIO(["no"])
        run_tuple((1, 2, 1, 1), stores, io)
        assert io.prompts[0].text == "Do you know the final speed of the car?"

    def test_caution_confirmed_inserts(self, stores):
        seed_car(stores)
        io = QueuedIO(["0 m/s", True])
        outcome = run_tuple((1, 2, 2, 1), stores, io)
        assert [p.kind for p in io.prompts] == [KNOW_VARIABLE, CAUTION_CONFIRM]
        assert outcome.status == "answered"
        assert stores.knowns.get((1, 2, 2, 1)).response == "0 m/s"

    def test_caution_declined_blocks_insertion(self, stores):
        seed_car(stores)
        io = QueuedIO(["0 m/s", False])
        outcome = run_tuple((1, 2, 2, 1), stores, io)
        assert outcome.status == "declined"
        assert stores.knowns.get((1, 2, 2, 1)) is None
        # and the same question is silently skipped this generation
        assert run_tuple((1, 2, 2, 1), stores, SilentIO()).status == "declined"

    def test_one_caution_per_distinct_past_variable(self, stores):
        seed_car(stores)
        # duplicate a across equations plus one dt entry: two distinct symbols
        stores.knowns.add(KnownEntry(1, 1, 5, 1, "5 m/s^2", "shared-propagation"))
        stores.knowns.add(KnownEntry(1, 2, 4, 1, "8 s", "student"))
        io = QueuedIO(["0 m/s", True, True])
        outcome = run_tuple((1, 2, 2, 1), stores, io)
        cautions = [p for p in io.prompts if p.kind == CAUTION_CONFIRM]
        assert len(cautions) == 2
        assert outcome.status == "answered"

    def test_answered_tuple_skipped_afterwards(self, stores):
        stores.objects.register(1, "the car")
        stores.objects.close()
        io = QueuedIO(["5 m/s^2", "speeding up"])
        assert run_tuple((1, 2, 3, 1), stores, io).status == "answered"
        assert run_tuple((1, 2, 3, 1), stores, SilentIO()).rule == 1
        # the shared-propagation copy blocks the same fact via equation 1 too
        assert run_tuple((1, 1, 5, 1), stores, SilentIO()).rule == 1


class TestRenderCaution:
    def test_template_fields_present(self, stores):
        entry = seed_car(stores)
        prompt = render_caution("x0", entry, stores)
        assert prompt.kind == CAUTION_CONFIRM
        assert "initial position" in prompt.text
        assert "the car" in prompt.text
        assert "5 m/s^2" in prompt.text
        assert "accelerating away from the traffic light" in prompt.text
        assert "start of" in prompt.text

    def test_phase_wording(self, stores, domain):
        entry = seed_car(stores)
        assert "end of" in render_caution("vx", entry, stores).text
        assert "during" in render_caution("dt", entry, stores).text

    def test_relationship_text_embedded(self, stores):
        stores.objects.register(1, "the car")
        stores.zones.register(1, 1, "cruising")
        entry = KnownEntry(1, 3, 1, 1, "8 s", "student")
        stores.knowns.add(entry)
        prompt = render_caution("v0x", entry, stores)
        assert "speed at the beginning of interval" in prompt.text

    def test_identity_pair_rejected(self, stores):
        entry = seed_car(stores)
        with pytest.raises(SameVariableError):
            render_caution("a", entry, stores)

    def test_unknown_object_and_zone(self, stores):
        entry = KnownEntry(4, 2, 3, 1, "5 m/s^2", "student")
        with pytest.raises(UnknownObjectError):
            render_caution("x0", entry, stores)
        stores.objects.register(4, "a sled")
        with pytest.raises(UnknownZoneError):
            render_caution("x0", entry, stores)


class TestDetectSolvable:
    def test_four_of_five_solves_equation_one(self, stores):
        stores.objects.register(1, "the car")
        stores.zones.register(1, 0, "accelerating")
        for position, value in ((2, "0 m"), (3, "0 m/s"), (4, "8 s"), (5, "5 m/s^2")):
            stores.knowns.add(KnownEntry(1, 1, position, 0, value, "student"))
        io = QueuedIO([])
        new_entries = drive_generator(detect_solvable(stores), io)
        solved = stores.knowns.get((1, 1, 1, 0))
        assert solved is not None and solved.provenance == "solved-algebraically"
        assert any(e is solved for e in new_entries)
        assert any(p.kind == SOLVE_ADVICE for p in io.notices)

    def test_chained_solve_through_propagation(self, stores):
        # equation 3 solves dt, whose copies complete nothing yet; then the
        # copies themselves count toward equations 1 and 2
        stores.objects.register(1, "the car")
        stores.zones.register(1, 2, "coasting")
        stores.knowns.add(KnownEntry(1, 3, 2, 2, "11 s", "student"))
        stores.knowns.add(KnownEntry(1, 3, 3, 2, "8 s", "student"))
        for position, value in ((1, "32 m"), (2, "0 m"), (3, "4 m/s")):
            stores.knowns.add(KnownEntry(1, 1, position, 2, value, "student"))
        new_entries = drive_generator(detect_solvable(stores), QueuedIO([]))
        symbols = {
            (stores.domain.variable_at(e.eqn, e.var), e.provenance) for e in new_entries
        }
        assert ("dt", "solved-algebraically") in symbols
        assert ("dt", "shared-propagation") in symbols
        # dt's copy gave equation 1 four knowns: a becomes solvable next pass
        assert ("a", "solved-algebraically") in symbols

    def test_insufficient_knowns_do_nothing(self, stores):
        stores.objects.register(1, "the car")
        stores.zones.register(1, 0, "accelerating")
        stores.knowns.add(KnownEntry(1, 2, 3, 0, "5 m/s^2", "student"))
        new_entries = drive_generator(detect_solvable(stores), SilentIO())
        assert new_entries == []
        assert len(stores.knowns) == 1

    def test_terminates_at_fixed_point(self, stores):
        stores.objects.register(1, "the car")
        stores.zones.register(1, 0, "sliding")
        for position, value in ((1, "3 s"), (2, "5 s")):
            stores.knowns.add(KnownEntry(1, 3, position, 0, value, "student"))
        first = drive_generator(detect_solvable(stores), QueuedIO([]))
        assert first
        again = drive_generator(detect_solvable(stores), SilentIO())
        assert again == []
