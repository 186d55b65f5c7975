/** Wire types, mirroring the service payloads field for field. */

export interface BBox {
  x: number
  y: number
  width: number
  height: number
}

export interface Binding {
  lemma: string
  language: string
  gloss: string
  synonyms: string[]
}

export interface Differentia {
  property: string
  required_value: string | number
}

export interface SchemaNode {
  node_id: string
  parent: string | null
  differentiae: Differentia[]
  binding: Binding | null
  concept_id: number
  /** canonical label: the bound lemma, or the synthesized phrase for gaps */
  label: string
  children: string[]
}

export interface PropertyInfo {
  id: string
  kind: 'enum' | 'integer' | 'boolean'
  variants?: string[]
  range?: [number, number]
  phrases: Record<string, string>
}

export interface SchemaPayload {
  schema_id: string
  version_stamp: string
  context: { name: string; purpose: string; language: string }
  root: string
  properties: PropertyInfo[]
  nodes: SchemaNode[]
}

export interface Resolution {
  path: string[]
  terminal: string
  status: 'leaf' | 'partial'
  unsatisfied_frontier: Record<string, Differentia[]>
}

export interface RecordPayload {
  record_id: string
  image: string
  bbox: BBox
  assertions: Record<string, string | number>
  node_id: string
  status: 'leaf' | 'partial'
  label: string
  concept_id: number
  schema_stamp: string
  annotator_id: string
  timestamp: string
}

export interface ImageInfo {
  image_id: string
  path: string
  width: number
  height: number
  checksum: string
}

export interface RegionReadback {
  region_id: string
  image: string
  bbox: BBox
  state: 'open' | 'classified' | 'finalized'
  assertions: Record<string, string | number>
}

export interface SessionReadback {
  session_id: string
  annotator_id: string
  images: string[]
  regions: RegionReadback[]
  records: RecordPayload[]
}

export interface WireError {
  code: string
  message: string
  locus: string | null
}

export interface Envelope<T> {
  status: 'ok' | 'error'
  schema_stamp: string | null
  payload?: T
  error?: WireError
}
