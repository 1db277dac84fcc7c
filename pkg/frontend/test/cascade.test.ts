import { describe, expect, it } from 'vitest';

import {
  INITIAL_STATE,
  UserEvent,
  computeCascadeState,
  invariantViolations,
} from '../src/cascade.js';
import { SchemaIndex, pairId } from '../src/schema.js';
import { fixtureIndex, mulberry32, pick } from './helpers.js';

const index = fixtureIndex();
const pid = index.pairIds()[0];
const pair = index.pair(pid)!;
const sentenceWithMentions = pair.sentences.find((s) => s.mentions.length > 0)!;
const firstMention = sentenceWithMentions.mentions[0];

function run(events: UserEvent[]) {
  let state = INITIAL_STATE;
  for (const event of events) {
    state = computeCascadeState(state, event, index);
  }
  return state;
}

describe('computeCascadeState', () => {
  it('ignores sentence hover while the pair is inactive', () => {
    const state = run([{ type: 'hover-sentence', sentenceId: sentenceWithMentions.id }]);
    expect(state).toEqual(INITIAL_STATE);
  });

  it('activates a pair from its sidebar cue', () => {
    const state = run([{ type: 'click-sidebar', pairId: pid }]);
    expect(state.activePair).toBe(pid);
    expect(state.hoveredSentence).toBeNull();
  });

  it('toggles the pair off on a second click', () => {
    const state = run([
      { type: 'click-sidebar', pairId: pid },
      { type: 'click-sidebar', pairId: pid },
    ]);
    expect(state).toEqual(INITIAL_STATE);
  });

  it('hovers a sentence only under the active pair', () => {
    const state = run([
      { type: 'click-sidebar', pairId: pid },
      { type: 'hover-sentence', sentenceId: sentenceWithMentions.id },
    ]);
    expect(state.hoveredSentence).toBe(sentenceWithMentions.id);
  });

  it('reveals mentions only after expansion', () => {
    const hoverOnly = run([
      { type: 'click-sidebar', pairId: pid },
      { type: 'hover-sentence', sentenceId: sentenceWithMentions.id },
      { type: 'hover-mention', mentionId: firstMention.id },
    ]);
    expect(hoverOnly.hoveredMention).toBeNull();

    const expanded = run([
      { type: 'click-sidebar', pairId: pid },
      { type: 'click-sentence', sentenceId: sentenceWithMentions.id },
      { type: 'hover-mention', mentionId: firstMention.id },
    ]);
    expect(expanded.hoveredMention).toBe(firstMention.id);
  });

  it('leave backs out one level at a time', () => {
    const full = run([
      { type: 'click-sidebar', pairId: pid },
      { type: 'click-sentence', sentenceId: sentenceWithMentions.id },
      { type: 'hover-mention', mentionId: firstMention.id },
    ]);
    const one = computeCascadeState(full, { type: 'leave' }, index);
    expect(one.hoveredMention).toBeNull();
    expect(one.expandedSentence).toBe(sentenceWithMentions.id);
    const two = computeCascadeState(one, { type: 'leave' }, index);
    expect(two.expandedSentence).toBeNull();
    expect(two.hoveredSentence).toBe(sentenceWithMentions.id);
    const three = computeCascadeState(two, { type: 'leave' }, index);
    expect(three.hoveredSentence).toBeNull();
    expect(three.activePair).toBe(pid);
  });

  it('ignores ids outside the schema', () => {
    const active = run([{ type: 'click-sidebar', pairId: pid }]);
    for (const event of [
      { type: 'click-sidebar', pairId: 'nope' } as UserEvent,
      { type: 'hover-sentence', sentenceId: 'nope' } as UserEvent,
      { type: 'click-sentence', sentenceId: 'nope' } as UserEvent,
      { type: 'hover-mention', mentionId: 'nope' } as UserEvent,
    ]) {
      expect(computeCascadeState(active, event, index)).toEqual(active);
    }
  });

  it('deactivate clears everything', () => {
    const state = run([
      { type: 'click-sidebar', pairId: pid },
      { type: 'click-sentence', sentenceId: sentenceWithMentions.id },
      { type: 'deactivate' },
    ]);
    expect(state).toEqual(INITIAL_STATE);
  });
});

describe('model-based random walks', () => {
  it('never violates invariants across 10000 random event sequences', () => {
    const rand = mulberry32(0x5eed);
    const sentenceIds = pair.sentences.map((s) => s.id);
    const mentionIds = pair.sentences.flatMap((s) => s.mentions.map((m) => m.id));
    const anyIds = ['nope', 'zzz', ...sentenceIds, ...mentionIds, pid, pairId(pair)];

    const randomEvent = (): UserEvent => {
      switch (Math.floor(rand() * 6)) {
        case 0:
          return { type: 'click-sidebar', pairId: pick(rand, [pid, 'nope']) };
        case 1:
          return { type: 'hover-sentence', sentenceId: pick(rand, anyIds) };
        case 2:
          return { type: 'click-sentence', sentenceId: pick(rand, anyIds) };
        case 3:
          return { type: 'hover-mention', mentionId: pick(rand, anyIds) };
        case 4:
          return { type: 'leave' };
        default:
          return { type: 'deactivate' };
      }
    };

    let transitions = 0;
    for (let sequence = 0; sequence < 10000; sequence++) {
      let state = INITIAL_STATE;
      const length = 1 + Math.floor(rand() * 12);
      for (let step = 0; step < length; step++) {
        state = computeCascadeState(state, randomEvent(), index);
        const problems = invariantViolations(state, index);
        expect(problems).toEqual([]);
        transitions++;
      }
    }
    expect(transitions).toBeGreaterThan(10000);
  });
});

describe('pair exclusivity', () => {
  // hand-built two-pair schema: only one pair may be active at a time
  const twoPair = new SchemaIndex({
    version: '1',
    doc_id: 'd',
    content_hash: 'x',
    pairs: [
      {
        paragraph_id: 'pA',
        table_id: 't1',
        reference_spans: [[0, 7]],
        sentences: [
          { id: 'pA:s0', span: [0, 10], sentence_boxes: [], regions: [], mentions: [] },
        ],
      },
      {
        paragraph_id: 'pB',
        table_id: 't2',
        reference_spans: [[0, 7]],
        sentences: [
          { id: 'pB:s0', span: [0, 10], sentence_boxes: [], regions: [], mentions: [] },
        ],
      },
    ],
  });

  it('activating another pair deactivates the first and clears deeper levels', () => {
    let state = computeCascadeState(
      INITIAL_STATE,
      { type: 'click-sidebar', pairId: 'pA::t1' },
      twoPair,
    );
    state = computeCascadeState(
      state,
      { type: 'click-sentence', sentenceId: 'pA:s0' },
      twoPair,
    );
    expect(state.expandedSentence).toBe('pA:s0');

    state = computeCascadeState(
      state,
      { type: 'click-sidebar', pairId: 'pB::t2' },
      twoPair,
    );
    expect(state.activePair).toBe('pB::t2');
    expect(state.hoveredSentence).toBeNull();
    expect(state.expandedSentence).toBeNull();
    expect(state.hoveredMention).toBeNull();
    expect(invariantViolations(state, twoPair)).toEqual([]);

    // the old pair's sentences are no longer hoverable
    const stale = computeCascadeState(
      state,
      { type: 'hover-sentence', sentenceId: 'pA:s0' },
      twoPair,
    );
    expect(stale).toEqual(state);
  });
});
