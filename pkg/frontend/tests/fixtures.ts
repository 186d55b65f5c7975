import type { Resolution, SchemaPayload } from '../src/types.js'

/** The musical-instrument vocabulary as the service serializes it. */
export const MUSIC: SchemaPayload = {
  schema_id: 'music',
  version_stamp: 'f'.repeat(64),
  context: { name: 'instrument-annotation', purpose: '', language: 'eng' },
  root: 'musical_instrument',
  properties: [
    {
      id: 'sound_production',
      kind: 'enum',
      variants: ['string_vibration', 'air_vibration'],
      phrases: { string_vibration: 'taut strings', air_vibration: 'vibrating air' },
    },
    {
      id: 'taut_string_count',
      kind: 'integer',
      range: [0, 100],
      phrases: { '6': 'six taut strings', '13': 'thirteen taut strings' },
    },
  ],
  nodes: [
    {
      node_id: 'guitar',
      parent: 'stringed_instrument',
      differentiae: [{ property: 'taut_string_count', required_value: 6 }],
      binding: {
        lemma: 'guitar', language: 'eng',
        gloss: 'a stringed instrument with six taut strings', synonyms: [],
      },
      concept_id: 1278956,
      label: 'guitar',
      children: [],
    },
    {
      node_id: 'koto',
      parent: 'stringed_instrument',
      differentiae: [{ property: 'taut_string_count', required_value: 13 }],
      binding: {
        lemma: 'koto', language: 'eng',
        gloss: 'a stringed instrument with thirteen taut strings', synonyms: ['japanese zither'],
      },
      concept_id: 1278950,
      label: 'koto',
      children: [],
    },
    {
      node_id: 'musical_instrument',
      parent: null,
      differentiae: [],
      binding: {
        lemma: 'musical instrument', language: 'eng',
        gloss: 'a device played to produce musical sound', synonyms: [],
      },
      concept_id: 1278951,
      label: 'musical instrument',
      children: ['stringed_instrument', 'wind_instrument'],
    },
    {
      node_id: 'stringed_instrument',
      parent: 'musical_instrument',
      differentiae: [{ property: 'sound_production', required_value: 'string_vibration' }],
      binding: {
        lemma: 'stringed instrument', language: 'eng',
        gloss: 'a musical instrument with taut strings sounded by vibration', synonyms: [],
      },
      concept_id: 1278952,
      label: 'stringed instrument',
      children: ['guitar', 'koto'],
    },
    {
      node_id: 'wind_instrument',
      parent: 'musical_instrument',
      differentiae: [{ property: 'sound_production', required_value: 'air_vibration' }],
      binding: {
        lemma: 'wind instrument', language: 'eng',
        gloss: 'a musical instrument with vibrating air driven by breath', synonyms: [],
      },
      concept_id: 1278953,
      label: 'wind instrument',
      children: [],
    },
  ],
}

export const PARTIAL_AT_STRINGED: Resolution = {
  path: ['musical_instrument', 'stringed_instrument'],
  terminal: 'stringed_instrument',
  status: 'partial',
  unsatisfied_frontier: {
    guitar: [{ property: 'taut_string_count', required_value: 6 }],
    koto: [{ property: 'taut_string_count', required_value: 13 }],
  },
}

export const LEAF_AT_KOTO: Resolution = {
  path: ['musical_instrument', 'stringed_instrument', 'koto'],
  terminal: 'koto',
  status: 'leaf',
  unsatisfied_frontier: {},
}
