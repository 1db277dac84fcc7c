import { describe, expect, it } from 'vitest';

import { chooseRenderMode, visibleFraction } from '../src/placement.js';

const tableBox = { page: 0, x: 0.0, y: 0.0, w: 0.5, h: 0.5 };

describe('chooseRenderMode', () => {
  it('0% visible (different page) -> anchored', () => {
    const viewport = { page: 1, x: 0, y: 0, w: 1, h: 1 };
    expect(visibleFraction(viewport, tableBox)).toBe(0);
    expect(chooseRenderMode(viewport, tableBox)).toBe('anchored');
  });

  it('0% visible (disjoint rect) -> anchored', () => {
    const viewport = { page: 0, x: 0.6, y: 0.6, w: 0.4, h: 0.4 };
    expect(chooseRenderMode(viewport, tableBox)).toBe('anchored');
  });

  it('40% visible -> anchored', () => {
    const viewport = { page: 0, x: 0, y: 0, w: 0.5, h: 0.2 };
    expect(visibleFraction(viewport, tableBox)).toBeCloseTo(0.4, 10);
    expect(chooseRenderMode(viewport, tableBox)).toBe('anchored');
  });

  it('60% visible -> in-situ', () => {
    const viewport = { page: 0, x: 0, y: 0, w: 0.5, h: 0.3 };
    expect(visibleFraction(viewport, tableBox)).toBeCloseTo(0.6, 10);
    expect(chooseRenderMode(viewport, tableBox)).toBe('in-situ');
  });

  it('100% visible -> in-situ', () => {
    const viewport = { page: 0, x: 0, y: 0, w: 1, h: 1 };
    expect(visibleFraction(viewport, tableBox)).toBeCloseTo(1.0, 10);
    expect(chooseRenderMode(viewport, tableBox)).toBe('in-situ');
  });

  it('exactly the 50% threshold stays in-situ', () => {
    const viewport = { page: 0, x: 0, y: 0, w: 0.5, h: 0.25 };
    expect(visibleFraction(viewport, tableBox)).toBeCloseTo(0.5, 10);
    expect(chooseRenderMode(viewport, tableBox)).toBe('in-situ');
  });
});
