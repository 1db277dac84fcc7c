export {
  LinkingSchema,
  NormalizedBox,
  SchemaIndex,
  SchemaMention,
  SchemaPair,
  SchemaRegion,
  SchemaSentence,
  Target,
  pairId,
  parseSchema,
} from './schema.js';
export {
  ActivationState,
  INITIAL_STATE,
  UserEvent,
  computeCascadeState,
  invariantViolations,
} from './cascade.js';
export {
  RenderMode,
  VISIBILITY_THRESHOLD,
  Viewport,
  chooseRenderMode,
  visibleFraction,
} from './placement.js';
export { Layer, RenderDirective, overlayDirectives } from './overlay.js';
export { mountOverlay } from './dom.js';
