from __future__ import annotations

import pytest

from vistax.errors import EmptyAssertionsError
from vistax.memory import ConceptMemory

SV = "string_vibration"


def test_first_encounter_creates_entry():
    memory = ConceptMemory()
    index, created = memory.observe({"sound_production": SV, "taut_string_count": 6})
    assert (index, created) == (0, True)
    assert memory.entries[0].count == 1


def test_identical_observation_matches():
    memory = ConceptMemory()
    obs = {"sound_production": SV, "taut_string_count": 6}
    memory.observe(obs)
    index, created = memory.observe(dict(obs))
    assert (index, created) == (0, False)
    assert memory.entries[0].count == 2


def test_dissimilar_observation_opens_new_entry():
    memory = ConceptMemory(theta=0.8)
    memory.observe({"sound_production": SV, "taut_string_count": 6})
    # shared pair: sound_production; union: sp, count=6, count=13 -> 1/3
    index, created = memory.observe({"sound_production": SV, "taut_string_count": 13})
    assert created and index == 1


def test_threshold_is_configurable():
    memory = ConceptMemory(theta=0.3)
    memory.observe({"sound_production": SV, "taut_string_count": 6})
    index, created = memory.observe({"sound_production": SV, "taut_string_count": 13})
    assert (index, created) == (0, False)
    assert memory.entries[0].count == 2


def test_ties_break_to_lowest_index():
    memory = ConceptMemory(theta=0.5)
    memory.observe({"sound_production": SV, "taut_string_count": 6})
    memory.observe({"sound_production": SV, "taut_string_count": 13})
    assert len(memory.entries) == 2
    # similarity 0.5 to both entries: the earlier one wins
    index, created = memory.observe({"sound_production": SV})
    assert (index, created) == (0, False)


def test_empty_assertions_rejected():
    with pytest.raises(EmptyAssertionsError):
        ConceptMemory().observe({})


def test_sketch_grows_and_counts_monotone():
    memory = ConceptMemory()
    sizes = []
    for count in (6, 6, 6):
        memory.observe({"sound_production": SV, "taut_string_count": count})
        sizes.append(len(memory.entries[0].sketch))
    assert sizes == [1, 2, 3]
    assert memory.entries[0].count == 3


def test_node_link_recorded():
    memory = ConceptMemory()
    memory.observe({"sound_production": SV, "taut_string_count": 6}, node_id="guitar")
    assert memory.entries[0].node_id == "guitar"


def test_deterministic_given_theta_and_order():
    def run():
        memory = ConceptMemory(theta=0.6)
        outcomes = []
        for obs in ({"sound_production": SV},
                    {"sound_production": SV, "taut_string_count": 6},
                    {"taut_string_count": 13},
                    {"sound_production": "air_vibration"}):
            outcomes.append(memory.observe(obs))
        return outcomes
    assert run() == run()


def test_invalid_theta():
    with pytest.raises(ValueError):
        ConceptMemory(theta=1.5)
