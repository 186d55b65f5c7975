import { Client } from './api.js'
import { renderApp } from './render.js'
import { Workbench } from './state.js'

/**
 * Boot: the annotator id comes from the query string (?annotator=alice),
 * never from a text field; the image queue defaults to the server's index.
 */
async function boot(): Promise<void> {
  const params = new URLSearchParams(window.location.search)
  const annotator = params.get('annotator') ?? 'anonymous'
  const images = params.get('images')?.split(',').filter(Boolean)
  const base = params.get('server') ?? ''
  const client = new Client(base)
  const workbench = new Workbench(client, annotator)

  const root = document.getElementById('app')!
  const canvas = document.getElementById('canvas') as HTMLElement
  const imageEl = document.getElementById('photo') as HTMLImageElement
  const boxLayer = document.getElementById('boxes') as unknown as SVGElement

  function drawBoxes(): void {
    const state = workbench.state
    const parts: string[] = []
    for (const region of state.regions) {
      if (region.image !== state.currentImage) continue
      const cls = region.regionId === state.activeRegionId ? 'box active' : `box ${region.status}`
      parts.push(`<rect class="${cls}" x="${region.bbox.x}" y="${region.bbox.y}"` +
        ` width="${region.bbox.width}" height="${region.bbox.height}"` +
        ` data-region="${region.regionId}"></rect>`)
    }
    if (state.drag) {
      const x = Math.min(state.drag.start.x, state.drag.end.x)
      const y = Math.min(state.drag.start.y, state.drag.end.y)
      const w = Math.abs(state.drag.end.x - state.drag.start.x)
      const h = Math.abs(state.drag.end.y - state.drag.start.y)
      parts.push(`<rect class="box draft" x="${x}" y="${y}" width="${w}" height="${h}"></rect>`)
    }
    boxLayer.innerHTML = parts.join('')
  }

  function rerender(): void {
    const state = workbench.state
    root.innerHTML = renderApp(state, workbench.schema)
    if (state.currentImage) {
      const url = client.imageUrl(state.currentImage)
      if (imageEl.getAttribute('src') !== url) imageEl.setAttribute('src', url)
      canvas.style.transform = `translate(${state.pan.x}px, ${state.pan.y}px) scale(${state.zoom})`
    }
    drawBoxes()
  }

  workbench.onChange(rerender)

  root.addEventListener('click', (event) => {
    const target = (event.target as HTMLElement).closest('[data-action]') as HTMLElement | null
    if (!target) return
    const action = target.dataset.action
    if (action === 'answer') {
      const raw = target.dataset.value!
      const value = target.dataset.kind === 'integer' ? Number(raw) : raw
      void workbench.answer(target.dataset.property!, value)
    } else if (action === 'retract') {
      void workbench.retract(target.dataset.property!)
    } else if (action === 'finalize') {
      void workbench.finalize()
    } else if (action === 'toggle-partial') {
      workbench.toggleAcceptPartial()
    } else if (action === 'select-region') {
      void workbench.selectRegion(target.dataset.region!)
    } else if (action === 'open-image') {
      workbench.openImage(target.dataset.image!)
    } else if (action === 'dismiss-dialog') {
      workbench.dismissDialog()
    }
  })

  let dragging = false
  canvas.addEventListener('pointerdown', (event) => {
    dragging = true
    canvas.setPointerCapture(event.pointerId)
    workbench.beginDrag({ x: event.offsetX, y: event.offsetY })
  })
  canvas.addEventListener('pointermove', (event) => {
    if (dragging) workbench.updateDrag({ x: event.offsetX, y: event.offsetY })
  })
  canvas.addEventListener('pointerup', () => {
    dragging = false
    void workbench.endDrag()
  })
  canvas.addEventListener('wheel', (event) => {
    event.preventDefault()
    const factor = event.deltaY < 0 ? 1.15 : 1 / 1.15
    workbench.setZoom(workbench.state.zoom * factor, { x: event.offsetX, y: event.offsetY })
  }, { passive: false })

  await workbench.start(images)
}

void boot()
