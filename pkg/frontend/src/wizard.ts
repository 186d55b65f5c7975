import type { Differentia, PropertyInfo, Resolution, SchemaPayload } from './types.js'

export interface FrontierQuestion {
  property: PropertyInfo
  /** candidate values drawn from the unsatisfied child differentiae,
   *  in child declaration order */
  values: Array<string | number>
  /** children that still need this property, for the blocked-finalize hint */
  children: string[]
}

function nodeIndex(schema: SchemaPayload) {
  return new Map(schema.nodes.map((n) => [n.node_id, n]))
}

function propertyIndex(schema: SchemaPayload) {
  return new Map(schema.properties.map((p) => [p.id, p]))
}

/**
 * The wizard only ever asks about properties appearing in the terminal
 * node's children's unsatisfied differentiae; the question order follows the
 * children's declaration order in the schema.
 */
export function frontierQuestions(schema: SchemaPayload, resolution: Resolution): FrontierQuestion[] {
  const nodes = nodeIndex(schema)
  const properties = propertyIndex(schema)
  const terminal = nodes.get(resolution.terminal)
  if (!terminal) return []
  const byProperty = new Map<string, FrontierQuestion>()
  for (const childId of terminal.children) {
    const unsatisfied: Differentia[] = resolution.unsatisfied_frontier[childId] ?? []
    for (const constraint of unsatisfied) {
      const info = properties.get(constraint.property)
      if (!info) continue
      let question = byProperty.get(constraint.property)
      if (!question) {
        question = { property: info, values: [], children: [] }
        byProperty.set(constraint.property, question)
      }
      if (!question.values.includes(constraint.required_value)) {
        question.values.push(constraint.required_value)
      }
      if (!question.children.includes(childId)) question.children.push(childId)
    }
  }
  return [...byProperty.values()]
}

/** Human text for a candidate value: the declared phrase when one exists. */
export function valuePhrase(property: PropertyInfo, value: string | number): string {
  return property.phrases[String(value)] ?? String(value)
}

/** Lines explaining why a partial region cannot finalize without the toggle. */
export function blockedExplanation(schema: SchemaPayload, resolution: Resolution): string[] {
  const nodes = nodeIndex(schema)
  const lines: string[] = []
  for (const [childId, constraints] of Object.entries(resolution.unsatisfied_frontier)) {
    const child = nodes.get(childId)
    const label = child ? child.label : childId
    const needs = constraints
      .map((c) => `${c.property} = ${c.required_value}`)
      .join(' and ')
    lines.push(`${label}: needs ${needs}`)
  }
  return lines
}
