import type { BBox } from './types.js'

export interface Point {
  x: number
  y: number
}

/** Map a pointer position on the viewport to image pixel coordinates. */
export function screenToImage(point: Point, zoom: number, pan: Point): Point {
  return { x: (point.x - pan.x) / zoom, y: (point.y - pan.y) / zoom }
}

/** Turn two drag corners (any order) into an integer-aligned box. */
export function normalizeDrag(start: Point, end: Point): BBox {
  const x = Math.min(start.x, end.x)
  const y = Math.min(start.y, end.y)
  return {
    x: Math.round(x),
    y: Math.round(y),
    width: Math.round(Math.abs(end.x - start.x)),
    height: Math.round(Math.abs(end.y - start.y)),
  }
}

/**
 * Snap a box into the image: drags past an edge are clamped before anything
 * is sent to the server, so an overshoot never produces a request error.
 * Returns null when nothing of the box remains inside the image.
 */
export function clampToImage(box: BBox, imageWidth: number, imageHeight: number): BBox | null {
  const left = Math.max(0, Math.min(box.x, imageWidth))
  const top = Math.max(0, Math.min(box.y, imageHeight))
  const right = Math.max(0, Math.min(box.x + box.width, imageWidth))
  const bottom = Math.max(0, Math.min(box.y + box.height, imageHeight))
  const clamped = { x: left, y: top, width: right - left, height: bottom - top }
  if (clamped.width <= 0 || clamped.height <= 0) return null
  return clamped
}

export function hasArea(box: BBox): boolean {
  return box.width > 0 && box.height > 0
}
