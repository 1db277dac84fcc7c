/*
 * Pure derivation of render directives from (state, schema, mode).
 *
 * Every box in a directive is copied verbatim from the schema. Directives
 * for table-side layers carry the surface they should attach to: the mirror
 * copy in anchored mode, the original table otherwise. The deepest active
 * level wins: a hovered mention's evidence boxes replace the sentence-level
 * region boxes for the same table.
 */

import { ActivationState } from './cascade.js';
import { NormalizedBox, SchemaIndex } from './schema.js';
import { RenderMode } from './placement.js';

export type Layer =
  | 'sidebar-cue'
  | 'sentence-highlight'
  | 'mention-span'
  | 'table-box'
  | 'mirror-table';

export interface RenderDirective {
  layer: Layer;
  boxes: NormalizedBox[];
  styleClass: string;
  /** id of the schema object being rendered (pair, sentence or mention) */
  ref: string;
  /** table-side layers only */
  surface?: 'original' | 'mirror';
  /** text-side character span, for layers anchored to the text layer */
  span?: [number, number];
}

export function overlayDirectives(
  state: ActivationState,
  index: SchemaIndex,
  mode: RenderMode,
): RenderDirective[] {
  const directives: RenderDirective[] = [];

  for (const pid of index.pairIds()) {
    const pair = index.pair(pid)!;
    directives.push({
      layer: 'sidebar-cue',
      boxes: pair.sentences.flatMap((s) => s.sentence_boxes),
      styleClass: pid === state.activePair ? 'cue cue-active' : 'cue',
      ref: pid,
    });
  }

  if (!state.activePair) return directives;
  const pair = index.pair(state.activePair);
  if (!pair) return directives;
  const surface = mode === 'anchored' ? 'mirror' : 'original';

  if (mode === 'anchored') {
    directives.push({
      layer: 'mirror-table',
      boxes: [],
      styleClass: 'mirror',
      ref: pair.table_id,
      surface: 'mirror',
    });
  }

  const focusId = state.hoveredSentence ?? state.expandedSentence;
  const focus = focusId ? index.sentence(focusId) : undefined;
  if (focus) {
    directives.push({
      layer: 'sentence-highlight',
      boxes: focus.sentence_boxes,
      styleClass: 'sentence',
      ref: focus.id,
      span: focus.span,
    });
  }

  const expanded = state.expandedSentence ? index.sentence(state.expandedSentence) : undefined;
  if (expanded) {
    for (const mention of expanded.mentions) {
      directives.push({
        layer: 'mention-span',
        boxes: [],
        styleClass:
          mention.id === state.hoveredMention ? 'mention mention-active' : 'mention',
        ref: mention.id,
        span: mention.span,
      });
    }
  }

  const hovered = state.hoveredMention ? index.mention(state.hoveredMention) : undefined;
  if (hovered) {
    directives.push({
      layer: 'table-box',
      boxes: hovered.boxes,
      styleClass: 'evidence',
      ref: hovered.id,
      surface,
    });
  } else if (focus) {
    for (const region of focus.regions) {
      directives.push({
        layer: 'table-box',
        boxes: region.boxes,
        styleClass: 'region',
        ref: focus.id,
        surface,
      });
    }
  }

  return directives;
}
