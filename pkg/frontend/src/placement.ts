/*
 * Adaptive table placement: highlight the original table when enough of it
 * is on screen, otherwise anchor a mirror copy beside the active paragraph.
 */

import { NormalizedBox } from './schema.js';

export type RenderMode = 'in-situ' | 'anchored';

/** Fraction of the table's area that must be visible to stay in-situ. */
export const VISIBILITY_THRESHOLD = 0.5;

/** Visible part of a page in normalized page coordinates. */
export interface Viewport {
  page: number;
  x: number;
  y: number;
  w: number;
  h: number;
}

export function visibleFraction(viewport: Viewport, tableBox: NormalizedBox): number {
  const area = tableBox.w * tableBox.h;
  if (area <= 0 || viewport.page !== tableBox.page) return 0;
  const ix = Math.max(
    0,
    Math.min(viewport.x + viewport.w, tableBox.x + tableBox.w) -
      Math.max(viewport.x, tableBox.x),
  );
  const iy = Math.max(
    0,
    Math.min(viewport.y + viewport.h, tableBox.y + tableBox.h) -
      Math.max(viewport.y, tableBox.y),
  );
  return (ix * iy) / area;
}

export function chooseRenderMode(viewport: Viewport, tableBox: NormalizedBox): RenderMode {
  return visibleFraction(viewport, tableBox) >= VISIBILITY_THRESHOLD
    ? 'in-situ'
    : 'anchored';
}
