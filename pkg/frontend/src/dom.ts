/*
 * Minimal DOM binding: positions directive boxes as absolutely positioned
 * elements over page containers. The host app supplies one positioned
 * element per page (its content box must match the rendered page), plus a
 * container for the anchored mirror table.
 */

import { RenderDirective } from './overlay.js';

export interface OverlayHost {
  /** page index -> positioned container element covering that page */
  pageElement(page: number): HTMLElement | null;
  /** container the mirror table and its highlights attach to */
  mirrorElement(): HTMLElement | null;
}

const LAYER_CLASS = 'tablink-overlay';

/** Replaces previously mounted overlay nodes with the given directives. */
export function mountOverlay(host: OverlayHost, directives: RenderDirective[]): void {
  const parents = new Set<HTMLElement>();
  const stale = document.querySelectorAll(`.${LAYER_CLASS}`);
  stale.forEach((node) => node.remove());

  for (const directive of directives) {
    for (const box of directive.boxes) {
      const parent =
        directive.surface === 'mirror' ? host.mirrorElement() : host.pageElement(box.page);
      if (!parent) continue;
      const node = document.createElement('div');
      node.className = `${LAYER_CLASS} ${directive.layer} ${directive.styleClass}`;
      node.dataset.ref = directive.ref;
      node.style.position = 'absolute';
      node.style.left = `${box.x * 100}%`;
      node.style.top = `${box.y * 100}%`;
      node.style.width = `${box.w * 100}%`;
      node.style.height = `${box.h * 100}%`;
      node.style.pointerEvents = 'none';
      parent.appendChild(node);
      parents.add(parent);
    }
  }
}
