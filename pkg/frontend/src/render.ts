import type { ViewState } from './state.js'
import type { Resolution, SchemaPayload, SchemaNode } from './types.js'
import { blockedExplanation, valuePhrase } from './wizard.js'

export function esc(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;')
}

function nodeById(schema: SchemaPayload, nodeId: string): SchemaNode | undefined {
  return schema.nodes.find((n) => n.node_id === nodeId)
}

/**
 * Breadcrumb of the current resolution path. Every visible label comes
 * verbatim from the schema payload; clicking a crumb retracts the property
 * that carried the descent into the following node.
 */
export function renderBreadcrumb(schema: SchemaPayload, resolution: Resolution): string {
  const crumbs = resolution.path.map((nodeId, index) => {
    const node = nodeById(schema, nodeId)
    const label = esc(node ? node.label : nodeId)
    const next = resolution.path[index + 1]
    if (!next) return `<span class="crumb current">${label}</span>`
    const nextNode = nodeById(schema, next)
    const property = nextNode?.differentiae[0]?.property
    const retract = property
      ? ` data-action="retract" data-property="${esc(property)}" role="button"`
      : ''
    return `<span class="crumb"${retract}>${label}</span>`
  })
  return `<nav class="breadcrumb">${crumbs.join(' › ')}</nav>`
}

/** Frontier questions as button groups; answering is always a choice,
 *  never typing. */
export function renderQuestions(state: ViewState, schema: SchemaPayload): string {
  if (state.questions.length === 0) return ''
  const blocks = state.questions.map((question) => {
    const buttons = question.values.map((value) => {
      const phrase = valuePhrase(question.property, value)
      return `<button type="button" data-action="answer"` +
        ` data-property="${esc(question.property.id)}"` +
        ` data-value="${esc(String(value))}"` +
        ` data-kind="${question.property.kind}">${esc(phrase)}</button>`
    })
    return `<fieldset class="question">` +
      `<legend>${esc(question.property.id.replace(/_/g, ' '))}</legend>` +
      buttons.join('') + `</fieldset>`
  })
  return `<section class="questions">${blocks.join('')}</section>`
}

/** Label + gloss confirmation panel for the resolved node. */
export function renderConfirm(state: ViewState, schema: SchemaPayload): string {
  const region = state.activeRegionId
    ? state.regions.find((r) => r.regionId === state.activeRegionId)
    : undefined
  if (!region || !region.resolution) return ''
  const resolution = region.resolution
  const node = nodeById(schema, resolution.terminal)
  if (!node) return ''
  const gloss = node.binding ? node.binding.gloss : ''
  const synonyms = node.binding && node.binding.synonyms.length
    ? `<p class="synonyms">also: ${node.binding.synonyms.map(esc).join(', ')}</p>`
    : ''
  const finalized = region.status === 'finalized'
  let action: string
  if (finalized) {
    action = `<p class="done">recorded as concept ${node.concept_id}</p>`
  } else if (resolution.status === 'leaf') {
    action = `<button type="button" data-action="finalize" class="confirm">` +
      `confirm “${esc(node.label)}”</button>`
  } else {
    const reasons = blockedExplanation(schema, resolution)
      .map((line) => `<li>${esc(line)}</li>`).join('')
    const toggle = `<label class="partial-toggle"><input type="checkbox"` +
      ` data-action="toggle-partial"${state.acceptPartial ? ' checked' : ''}>` +
      ` record at this level anyway</label>`
    const warning = `<div class="partial-warning">not at a leaf yet — missing:` +
      `<ul>${reasons}</ul>${toggle}</div>`
    const button = state.acceptPartial
      ? `<button type="button" data-action="finalize" class="confirm partial">` +
        `record “${esc(node.label)}” (partial)</button>`
      : ''
    action = warning + button
  }
  return `<section class="confirm-panel" data-status="${resolution.status}">` +
    `<h2 class="label">${esc(node.label)}</h2>` +
    `<p class="gloss">${esc(gloss)}</p>` +
    synonyms +
    `<p class="concept">concept id ${node.concept_id}</p>` +
    action +
    `</section>`
}

export function renderRegions(state: ViewState): string {
  if (!state.currentImage) return ''
  const rows = state.regions
    .filter((r) => r.image === state.currentImage)
    .map((region) => {
      const active = region.regionId === state.activeRegionId ? ' active' : ''
      return `<li class="region ${region.status}${active}"` +
        ` data-action="select-region" data-region="${esc(region.regionId)}">` +
        `${esc(region.regionId)} · ${region.bbox.width}×${region.bbox.height}` +
        ` · ${region.status}</li>`
    })
  return `<ul class="regions">${rows.join('')}</ul>`
}

export function renderImageStrip(state: ViewState): string {
  const items = state.images.map((imageId) => {
    const current = imageId === state.currentImage ? ' current' : ''
    return `<button type="button" class="image-tab${current}"` +
      ` data-action="open-image" data-image="${esc(imageId)}">${esc(imageId)}</button>`
  })
  return `<div class="image-strip">${items.join('')}</div>`
}

export function renderErrors(state: ViewState): string {
  const inline = state.inlineError
    ? `<p class="inline-error" role="alert">${esc(state.inlineError)}</p>` : ''
  const dialog = state.dialogError
    ? `<dialog open class="error-dialog"><p>${esc(state.dialogError)}</p>` +
      `<button type="button" data-action="dismiss-dialog">ok</button></dialog>`
    : ''
  return inline + dialog
}

export function renderApp(state: ViewState, schema: SchemaPayload | null): string {
  if (!schema) return `<p class="loading">loading vocabulary…</p>`
  const region = state.activeRegionId
    ? state.regions.find((r) => r.regionId === state.activeRegionId)
    : undefined
  const breadcrumb = region?.resolution
    ? renderBreadcrumb(schema, region.resolution)
    : ''
  return [
    `<header><strong>${esc(schema.schema_id)}</strong>` +
    ` <code class="stamp">${esc(schema.version_stamp.slice(0, 16))}</code>` +
    ` <span class="progress">${state.finalizedCount} recorded</span></header>`,
    renderImageStrip(state),
    renderErrors(state),
    breadcrumb,
    renderQuestions(state, schema),
    renderConfirm(state, schema),
    renderRegions(state),
  ].join('\n')
}
