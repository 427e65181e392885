export type Rgb = [number, number, number];

export interface Placement {
  anchor_x: number;
  anchor_y: number;
  scale: number;
}

export interface PrintableRegion {
  x: number;
  y: number;
  w: number;
  h: number;
}

export interface PatternSummary {
  id: string;
  name: string;
  thumbnail_url: string;
  printable_region: PrintableRegion;
}

export interface SessionRecord {
  session_id: string;
  pattern_id: string;
  revision: number;
  target_color: Rgb | null;
  paint_asset_id: string | null;
  placement: Placement | null;
  created_at: string;
  updated_at: string;
}

export interface PaintResult {
  asset_id: string;
  refined_prompt: string;
  image_url: string;
}

export interface AvatarSummary {
  avatar_id: string;
  preview_url: string;
}

/** Partial design update; absent keys are left untouched by the server. */
export interface DesignPatch {
  target_color?: Rgb | null;
  paint_asset_id?: string | null;
  placement?: Placement | null;
}
