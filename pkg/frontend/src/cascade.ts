/*
 * Progressive cascade activation state machine.
 *
 * Three gates: a pair is activated from its sidebar cue, sentences light up
 * on hover only inside the active pair, and mention-level detail appears
 * only after a sentence is expanded by click. "leave" backs out one level at
 * a time; events referencing ids outside the schema are ignored.
 */

import { SchemaIndex } from './schema.js';

export interface ActivationState {
  activePair: string | null;
  hoveredSentence: string | null;
  expandedSentence: string | null;
  hoveredMention: string | null;
}

export const INITIAL_STATE: ActivationState = {
  activePair: null,
  hoveredSentence: null,
  expandedSentence: null,
  hoveredMention: null,
};

export type UserEvent =
  | { type: 'click-sidebar'; pairId: string }
  | { type: 'hover-sentence'; sentenceId: string }
  | { type: 'click-sentence'; sentenceId: string }
  | { type: 'hover-mention'; mentionId: string }
  | { type: 'leave' }
  | { type: 'deactivate' };

export function computeCascadeState(
  prev: ActivationState,
  event: UserEvent,
  index: SchemaIndex,
): ActivationState {
  switch (event.type) {
    case 'click-sidebar': {
      if (!index.pair(event.pairId)) return prev;
      if (prev.activePair === event.pairId) return INITIAL_STATE; // toggle off
      // exactly one pair active at a time
      return { ...INITIAL_STATE, activePair: event.pairId };
    }
    case 'hover-sentence': {
      if (!prev.activePair) return prev;
      if (index.pairOf(event.sentenceId) !== prev.activePair) return prev;
      return { ...prev, hoveredSentence: event.sentenceId };
    }
    case 'click-sentence': {
      if (!prev.activePair) return prev;
      if (index.pairOf(event.sentenceId) !== prev.activePair) return prev;
      return {
        ...prev,
        hoveredSentence: event.sentenceId,
        expandedSentence: event.sentenceId,
        hoveredMention: null,
      };
    }
    case 'hover-mention': {
      if (!prev.expandedSentence) return prev;
      if (index.sentenceOf(event.mentionId) !== prev.expandedSentence) return prev;
      return { ...prev, hoveredMention: event.mentionId };
    }
    case 'leave': {
      if (prev.hoveredMention) return { ...prev, hoveredMention: null };
      if (prev.expandedSentence) return { ...prev, expandedSentence: null };
      if (prev.hoveredSentence) return { ...prev, hoveredSentence: null };
      return prev; // the pair stays active until deactivated
    }
    case 'deactivate':
      return INITIAL_STATE;
  }
}

/** Invariant violations of a state against a schema; empty when healthy. */
export function invariantViolations(state: ActivationState, index: SchemaIndex): string[] {
  const problems: string[] = [];
  if (state.activePair && !index.pair(state.activePair)) {
    problems.push(`active pair ${state.activePair} not in schema`);
  }
  for (const sid of [state.hoveredSentence, state.expandedSentence]) {
    if (sid === null) continue;
    if (!state.activePair) {
      problems.push(`sentence ${sid} set without an active pair`);
    } else if (index.pairOf(sid) !== state.activePair) {
      problems.push(`sentence ${sid} not in active pair ${state.activePair}`);
    }
  }
  if (state.hoveredMention) {
    if (!state.expandedSentence) {
      problems.push('mention hovered without an expanded sentence');
    } else if (index.sentenceOf(state.hoveredMention) !== state.expandedSentence) {
      problems.push(
        `mention ${state.hoveredMention} not in expanded sentence ${state.expandedSentence}`,
      );
    }
  }
  return problems;
}
