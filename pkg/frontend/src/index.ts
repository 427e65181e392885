export { ApiError, StudioApiClient } from './api.js';
export { movedPlacement, samePlacement, scaledPlacement } from './placement.js';
export { UiDesignViewModel } from './viewModel.js';
export { mountStudio } from './main.js';
export type {
  AvatarSummary,
  DesignPatch,
  PaintResult,
  PatternSummary,
  Placement,
  PrintableRegion,
  Rgb,
  SessionRecord,
} from './types.js';
