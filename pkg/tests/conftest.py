from __future__ import annotations

import pytest

from vistax import (
    ContextProfile,
    DifferentiaConstraint as C,
    LexicalBinding,
    PropertyDef,
    Schema,
    freeze,
)

# Shared musical-instrument fixture: two properties, five nodes, all bound,
# guitar carrying the conventional explicit id 1278956.

MUSIC_BASE = 1278950
GUITAR_ID = 1278956


def build_music_draft() -> Schema:
    schema = Schema(
        "music",
        ContextProfile(name="instrument-annotation",
                       purpose="desk-scale musical instrument labeling",
                       language="eng"),
        root_id="musical_instrument",
        registry_base=MUSIC_BASE,
    )
    schema.add_property(PropertyDef(
        id="sound_production", kind="enum",
        variants=("string_vibration", "air_vibration"),
        phrase_map={"string_vibration": "taut strings",
                    "air_vibration": "vibrating air"},
    ))
    schema.add_property(PropertyDef(
        id="taut_string_count", kind="integer", int_range=(0, 100),
        phrase_map={6: "six taut strings", 13: "thirteen taut strings"},
    ))
    schema.set_binding("musical_instrument", LexicalBinding(
        lemma="musical instrument", language="eng",
        gloss="a device played to produce musical sound",
    ))
    schema.add_node(
        "stringed_instrument", "musical_instrument",
        (C("sound_production", "string_vibration"),),
        LexicalBinding(lemma="stringed instrument", language="eng",
                       gloss="a musical instrument with taut strings sounded by vibration"),
    )
    schema.add_node(
        "guitar", "stringed_instrument",
        (C("taut_string_count", 6),),
        LexicalBinding(lemma="guitar", language="eng",
                       gloss="a stringed instrument with six taut strings"),
        concept_id=GUITAR_ID,
    )
    schema.add_node(
        "koto", "stringed_instrument",
        (C("taut_string_count", 13),),
        LexicalBinding(lemma="koto", language="eng",
                       gloss="a stringed instrument with thirteen taut strings"),
    )
    schema.add_node(
        "wind_instrument", "musical_instrument",
        (C("sound_production", "air_vibration"),),
        LexicalBinding(lemma="wind instrument", language="eng",
                       gloss="a musical instrument with vibrating air driven by breath"),
    )
    return schema


@pytest.fixture
def music_draft() -> Schema:
    return build_music_draft()


@pytest.fixture
def music() -> Schema:
    return freeze(build_music_draft())
