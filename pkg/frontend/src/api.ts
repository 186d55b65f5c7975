import type {
  BBox,
  Envelope,
  ImageInfo,
  RecordPayload,
  Resolution,
  SchemaPayload,
  SessionReadback,
} from './types.js'

export class ApiError extends Error {
  constructor(
    readonly code: string,
    message: string,
    readonly httpStatus: number,
    readonly locus: string | null = null,
  ) {
    super(message)
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>

/**
 * Typed client over the annotation service. The first schema stamp seen is
 * pinned; any later response carrying a different stamp is refused, so a
 * workbench session can never silently mix vocabularies.
 */
export class Client {
  private stamp: string | null = null

  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  pinnedStamp(): string | null {
    return this.stamp
  }

  private async call<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: { 'Content-Type': 'application/json' } }
    if (body !== undefined) init.body = JSON.stringify(body)
    const response = await this.fetchImpl(this.baseUrl + path, init)
    const envelope = (await response.json()) as Envelope<T>
    if (envelope.schema_stamp) {
      if (this.stamp === null) this.stamp = envelope.schema_stamp
      else if (this.stamp !== envelope.schema_stamp)
        throw new ApiError('StampMismatch',
          `server schema changed (${this.stamp} -> ${envelope.schema_stamp}); reload`,
          response.status)
    }
    if (envelope.status !== 'ok' || envelope.payload === undefined) {
      const err = envelope.error ?? { code: 'Unknown', message: 'malformed response', locus: null }
      throw new ApiError(err.code, err.message, response.status, err.locus)
    }
    return envelope.payload
  }

  getSchema(): Promise<SchemaPayload> {
    return this.call('GET', '/schema')
  }

  listImages(): Promise<{ images: ImageInfo[] }> {
    return this.call('GET', '/images')
  }

  imageUrl(imageId: string): string {
    return `${this.baseUrl}/images/${encodeURIComponent(imageId)}`
  }

  createSession(annotatorId: string, images: string[], requestId?: string) {
    return this.call<{ session_id: string; images: string[] }>('POST', '/sessions', {
      annotator_id: annotatorId,
      images,
      request_id: requestId,
    })
  }

  getSession(sessionId: string): Promise<SessionReadback> {
    return this.call('GET', `/sessions/${encodeURIComponent(sessionId)}`)
  }

  createRegion(sessionId: string, image: string, bbox: BBox, requestId?: string) {
    return this.call<{ region_id: string; image: string; bbox: BBox }>(
      'POST', `/sessions/${encodeURIComponent(sessionId)}/regions`,
      { image, bbox, request_id: requestId })
  }

  assertProperty(regionId: string, property: string, value: string | number,
                 requestId?: string): Promise<Resolution> {
    return this.call('POST', `/regions/${encodeURIComponent(regionId)}/assertions`,
      { property, value, request_id: requestId })
  }

  retractProperty(regionId: string, property: string): Promise<Resolution> {
    return this.call('DELETE',
      `/regions/${encodeURIComponent(regionId)}/assertions/${encodeURIComponent(property)}`)
  }

  getResolution(regionId: string): Promise<Resolution> {
    return this.call('GET', `/regions/${encodeURIComponent(regionId)}/resolution`)
  }

  finalize(regionId: string, acceptPartial: boolean, requestId: string): Promise<RecordPayload> {
    return this.call('POST', `/regions/${encodeURIComponent(regionId)}/finalize`,
      { accept_partial: acceptPartial, request_id: requestId })
  }
}
