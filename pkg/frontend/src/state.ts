import { ApiError, Client } from './api.js'
import { clampToImage, hasArea, normalizeDrag, screenToImage, type Point } from './geometry.js'
import type { BBox, RecordPayload, Resolution, SchemaPayload } from './types.js'
import { frontierQuestions, type FrontierQuestion } from './wizard.js'

export type RegionStatus = 'open' | 'classified' | 'finalized'

export interface RegionView {
  regionId: string
  image: string
  bbox: BBox
  status: RegionStatus
  resolution: Resolution | null
  record: RecordPayload | null
}

export interface ViewState {
  annotatorId: string
  sessionId: string | null
  images: string[]
  imageSizes: Record<string, { width: number; height: number }>
  currentImage: string | null
  zoom: number
  pan: Point
  drag: { start: Point; end: Point } | null
  regions: RegionView[]
  activeRegionId: string | null
  questions: FrontierQuestion[]
  acceptPartial: boolean
  inlineError: string | null
  dialogError: string | null
  finalizedCount: number
}

/**
 * All client-side behaviour, DOM-free: the renderer draws from the state and
 * calls these methods, and a scripted session can drive the same controller
 * headlessly. Nothing here ever stores a label; labels live only in the
 * schema payload the renderer reads.
 */
export class Workbench {
  state: ViewState
  schema: SchemaPayload | null = null
  private listeners: Array<(state: ViewState) => void> = []
  private requestCounter = 0
  // per-instance nonce: request ids must never collide with those of an
  // earlier client that worked the same session
  private readonly instanceId = crypto.randomUUID()
  private finalizeRequestIds = new Map<string, string>()

  constructor(private readonly client: Client, annotatorId: string) {
    this.state = {
      annotatorId,
      sessionId: null,
      images: [],
      imageSizes: {},
      currentImage: null,
      zoom: 1,
      pan: { x: 0, y: 0 },
      drag: null,
      regions: [],
      activeRegionId: null,
      questions: [],
      acceptPartial: false,
      inlineError: null,
      dialogError: null,
      finalizedCount: 0,
    }
  }

  onChange(listener: (state: ViewState) => void): void {
    this.listeners.push(listener)
  }

  private emit(): void {
    for (const listener of this.listeners) listener(this.state)
  }

  private nextRequestId(): string {
    this.requestCounter += 1
    return `${this.instanceId}-${this.requestCounter}`
  }

  private async guard<T>(action: () => Promise<T>, inline = true): Promise<T | null> {
    try {
      const result = await action()
      this.state.inlineError = null
      return result
    } catch (error) {
      const message = error instanceof ApiError
        ? `${error.code}: ${error.message}`
        : String(error)
      if (inline) this.state.inlineError = message
      else this.state.dialogError = message
      this.emit()
      return null
    }
  }

  async start(images?: string[]): Promise<void> {
    this.schema = await this.client.getSchema()
    let queue = images
    if (!queue || queue.length === 0) {
      const index = await this.client.listImages()
      queue = index.images.map((info) => info.image_id)
      for (const info of index.images) {
        this.state.imageSizes[info.image_id] = { width: info.width, height: info.height }
      }
    }
    const session = await this.client.createSession(
      this.state.annotatorId, queue, this.nextRequestId())
    this.state.sessionId = session.session_id
    this.state.images = queue
    this.state.currentImage = queue[0] ?? null
    this.emit()
  }

  /**
   * Rebuild the whole view from the server, given nothing but a session id:
   * the client holds no state a reload can lose.
   */
  async resume(sessionId: string): Promise<void> {
    this.schema = await this.client.getSchema()
    const readback = await this.client.getSession(sessionId)
    this.state.sessionId = readback.session_id
    this.state.annotatorId = readback.annotator_id
    this.state.images = readback.images
    this.state.currentImage = readback.images[0] ?? null
    this.state.finalizedCount = readback.records.length
    const recordsById = new Map(readback.records.map((r) => [r.record_id, r]))
    this.state.regions = []
    for (const region of readback.regions) {
      const view: RegionView = {
        regionId: region.region_id,
        image: region.image,
        bbox: region.bbox,
        status: region.state,
        resolution: null,
        record: recordsById.get(region.region_id) ?? null,
      }
      if (region.state !== 'finalized') {
        view.resolution = await this.client.getResolution(region.region_id)
      }
      this.state.regions.push(view)
    }
    const open = this.state.regions.find((r) => r.status !== 'finalized')
    if (open) {
      this.state.currentImage = open.image
      await this.selectRegion(open.regionId)
    }
    this.emit()
  }

  openImage(imageId: string): void {
    this.state.currentImage = imageId
    this.state.drag = null
    this.state.activeRegionId = null
    this.state.questions = []
    this.emit()
  }

  // --- bbox drawing (screen coordinates in, image pixels out) ---

  beginDrag(point: Point): void {
    const image = screenToImage(point, this.state.zoom, this.state.pan)
    this.state.drag = { start: image, end: image }
    this.emit()
  }

  updateDrag(point: Point): void {
    if (!this.state.drag) return
    this.state.drag.end = screenToImage(point, this.state.zoom, this.state.pan)
    this.emit()
  }

  async endDrag(): Promise<string | null> {
    const drag = this.state.drag
    const image = this.state.currentImage
    this.state.drag = null
    if (!drag || !image || !this.state.sessionId) return null
    let box: BBox | null = normalizeDrag(drag.start, drag.end)
    if (!hasArea(box)) {
      this.state.inlineError = 'draw a box with a real area'
      this.emit()
      return null
    }
    const size = this.state.imageSizes[image]
    if (size) {
      box = clampToImage(box, size.width, size.height)
      if (!box) {
        this.state.inlineError = 'box lies entirely outside the image'
        this.emit()
        return null
      }
    }
    const bbox = box
    const created = await this.guard(() =>
      this.client.createRegion(this.state.sessionId!, image, bbox, this.nextRequestId()))
    if (!created) return null
    const region: RegionView = {
      regionId: created.region_id,
      image,
      bbox: created.bbox,
      status: 'open',
      resolution: null,
      record: null,
    }
    this.state.regions.push(region)
    await this.selectRegion(region.regionId)
    return region.regionId
  }

  region(regionId: string): RegionView | undefined {
    return this.state.regions.find((r) => r.regionId === regionId)
  }

  async selectRegion(regionId: string): Promise<void> {
    const region = this.region(regionId)
    if (!region) return
    this.state.activeRegionId = regionId
    this.state.acceptPartial = false
    if (region.status !== 'finalized' && region.resolution === null) {
      const resolution = await this.guard(() => this.client.getResolution(regionId))
      if (resolution) region.resolution = resolution
    }
    this.refreshQuestions()
    this.emit()
  }

  private refreshQuestions(): void {
    const region = this.state.activeRegionId ? this.region(this.state.activeRegionId) : undefined
    if (!this.schema || !region || !region.resolution || region.status === 'finalized') {
      this.state.questions = []
      return
    }
    this.state.questions = frontierQuestions(this.schema, region.resolution)
  }

  async answer(property: string, value: string | number): Promise<void> {
    const regionId = this.state.activeRegionId
    if (!regionId) return
    const resolution = await this.guard(() =>
      this.client.assertProperty(regionId, property, value, this.nextRequestId()))
    if (!resolution) return
    this.applyResolution(regionId, resolution)
  }

  async retract(property: string): Promise<void> {
    const regionId = this.state.activeRegionId
    if (!regionId) return
    const resolution = await this.guard(() => this.client.retractProperty(regionId, property))
    if (!resolution) return
    this.applyResolution(regionId, resolution)
  }

  private applyResolution(regionId: string, resolution: Resolution): void {
    const region = this.region(regionId)
    if (!region) return
    region.resolution = resolution
    region.status = resolution.status === 'leaf' ? 'classified' : 'open'
    this.refreshQuestions()
    this.emit()
  }

  toggleAcceptPartial(): void {
    this.state.acceptPartial = !this.state.acceptPartial
    this.emit()
  }

  /**
   * Finalize the active region. The request id is allocated once per region,
   * so a double click replays the first response instead of recording twice.
   */
  async finalize(): Promise<RecordPayload | null> {
    const regionId = this.state.activeRegionId
    if (!regionId) return null
    const region = this.region(regionId)
    if (!region) return null
    let requestId = this.finalizeRequestIds.get(regionId)
    if (!requestId) {
      requestId = this.nextRequestId()
      this.finalizeRequestIds.set(regionId, requestId)
    }
    const record = await this.guard(
      () => this.client.finalize(regionId, this.state.acceptPartial, requestId!),
      false)
    if (!record) {
      this.finalizeRequestIds.delete(regionId)
      return null
    }
    if (region.status !== 'finalized') {
      region.status = 'finalized'
      region.record = record
      this.state.finalizedCount += 1
    }
    this.advanceQueue(region.image)
    this.refreshQuestions()
    this.emit()
    return record
  }

  private advanceQueue(imageId: string): void {
    const pending = this.state.regions.some(
      (r) => r.image === imageId && r.status !== 'finalized')
    if (pending) return
    const index = this.state.images.indexOf(imageId)
    const next = this.state.images[index + 1]
    if (next) {
      this.state.currentImage = next
      this.state.activeRegionId = null
      this.state.questions = []
    }
  }

  dismissDialog(): void {
    this.state.dialogError = null
    this.emit()
  }

  setZoom(zoom: number, focus: Point): void {
    const clamped = Math.min(8, Math.max(0.25, zoom))
    const before = screenToImage(focus, this.state.zoom, this.state.pan)
    this.state.zoom = clamped
    this.state.pan = {
      x: focus.x - before.x * clamped,
      y: focus.y - before.y * clamped,
    }
    this.emit()
  }
}
