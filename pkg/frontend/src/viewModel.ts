import { ApiError, StudioApiClient } from './api.js';
import { movedPlacement, scaledPlacement } from './placement.js';
import type {
  AvatarSummary,
  DesignPatch,
  PaintResult,
  PatternSummary,
  Placement,
  Rgb,
  SessionRecord,
} from './types.js';

export interface PendingFlags {
  paint: boolean;
  patch: boolean;
  tryon: boolean;
}

/** Editor state mirror plus the request plumbing around it.
 *
 * Invariants:
 * - every PATCH carries the last acknowledged revision as expected_revision;
 * - at most one PATCH is in flight (later ones queue behind it);
 * - a 409 refetches the server state and replays nothing;
 * - everything here is reconstructable from GET endpoints via reload().
 */
export class UiDesignViewModel {
  patterns: PatternSummary[] = [];
  avatars: AvatarSummary[] = [];
  record: SessionRecord | null = null;
  pending: PendingFlags = { paint: false, patch: false, tryon: false };
  errorBanner: string | null = null;
  tryOnMessage: string | null = null;
  lastRenderUrl: string | null = null;
  lastTryOnImage: Uint8Array | null = null;
  /** Prompt text preserved across a failed generation, per the dialog contract. */
  lastPrompt = '';
  proposedPaint: PaintResult | null = null;
  /** Optimistic placement shown while a drag is in progress. */
  dragPlacement: Placement | null = null;

  private queue: Promise<void> = Promise.resolve();

  constructor(private readonly api: StudioApiClient) {}

  // -- gallery ---------------------------------------------------------------

  async loadGallery(): Promise<void> {
    try {
      this.patterns = await this.api.listPatterns();
      this.errorBanner = null;
    } catch (err) {
      this.errorBanner = `Could not load patterns: ${message(err)}. Retry?`;
    }
  }

  async selectPattern(patternId: string): Promise<void> {
    try {
      this.record = await this.api.createSession(patternId);
      this.errorBanner = null;
      this.refreshRenderUrl();
    } catch (err) {
      this.errorBanner = `Could not start a session: ${message(err)}. Retry?`;
    }
  }

  /** Rebuild the full editor state from GET endpoints (page reload). */
  async reload(sessionId: string): Promise<void> {
    this.patterns = await this.api.listPatterns();
    this.avatars = await this.api.listAvatars();
    this.record = await this.api.getSession(sessionId);
    this.dragPlacement = null;
    this.proposedPaint = null;
    this.refreshRenderUrl();
  }

  async loadAvatars(): Promise<void> {
    this.avatars = await this.api.listAvatars();
  }

  // -- paint dialog ----------------------------------------------------------

  async submitPrompt(prompt: string): Promise<void> {
    if (!this.record) throw new Error('no active session');
    this.lastPrompt = prompt;
    this.pending.paint = true;
    try {
      this.proposedPaint = await this.api.generatePaint(this.record.session_id, prompt);
      this.errorBanner = null;
    } catch (err) {
      if (err instanceof ApiError && err.status === 502) {
        this.errorBanner = 'The paint generator is unavailable; your prompt was kept.';
      } else {
        this.errorBanner = `Paint generation failed: ${message(err)}`;
      }
    } finally {
      this.pending.paint = false;
    }
  }

  async acceptPaint(): Promise<void> {
    if (!this.proposedPaint) throw new Error('no paint to accept');
    await this.patch({ paint_asset_id: this.proposedPaint.asset_id });
  }

  // -- canvas editor ---------------------------------------------------------

  async setTargetColor(color: Rgb): Promise<void> {
    await this.patch({ target_color: color });
  }

  /** The placement the canvas should draw right now. */
  displayedPlacement(): Placement | null {
    return this.dragPlacement ?? this.record?.placement ?? null;
  }

  beginDrag(): void {
    this.dragPlacement = this.displayedPlacement();
  }

  dragBy(dx: number, dy: number): void {
    if (!this.dragPlacement) return;
    this.dragPlacement = movedPlacement(this.dragPlacement, dx, dy);
  }

  scaleBy(factor: number): void {
    if (!this.dragPlacement) this.beginDrag();
    if (!this.dragPlacement) return;
    this.dragPlacement = scaledPlacement(this.dragPlacement, factor);
  }

  /** Release: one debounced PATCH; the display then snaps to the server's
   * clamped placement. */
  async endDrag(): Promise<void> {
    const proposed = this.dragPlacement;
    if (!proposed) return;
    await this.patch({ placement: proposed });
    this.dragPlacement = null;
  }

  // -- try-on ----------------------------------------------------------------

  async requestTryOn(avatarId: string): Promise<void> {
    if (!this.record) throw new Error('no active session');
    this.pending.tryon = true;
    try {
      this.lastTryOnImage = await this.api.tryOn(this.record.session_id, avatarId);
      this.tryOnMessage = null;
    } catch (err) {
      if (err instanceof ApiError && err.status === 503) {
        this.tryOnMessage = 'No try-on model is loaded on the server.';
      } else {
        this.tryOnMessage = `Try-on failed: ${message(err)}`;
      }
    } finally {
      this.pending.tryon = false;
    }
  }

  // -- patch plumbing --------------------------------------------------------

  private patch(body: DesignPatch): Promise<void> {
    // serialize PATCHes: expected_revision is read after the predecessor
    // settles, so it is always the last acknowledged revision
    const run = this.queue.then(() => this.sendPatch(body));
    this.queue = run.catch(() => undefined);
    return run;
  }

  private async sendPatch(body: DesignPatch): Promise<void> {
    if (!this.record) throw new Error('no active session');
    this.pending.patch = true;
    try {
      this.record = await this.api.patchDesign(this.record.session_id, this.record.revision, body);
      this.errorBanner = null;
      this.refreshRenderUrl();
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        // lost a race: adopt the server state, replay nothing
        this.record = await this.api.getSession(this.record.session_id);
        this.refreshRenderUrl();
        this.errorBanner = 'The design changed elsewhere; your last edit was not applied.';
      } else {
        this.errorBanner = `Update failed: ${message(err)}`;
      }
    } finally {
      this.pending.patch = false;
    }
  }

  private refreshRenderUrl(): void {
    if (this.record) {
      this.lastRenderUrl = this.api.renderUrl(this.record.session_id, this.record.revision);
    }
  }
}

function message(err: unknown): string {
  return err instanceof Error ? err.message : String(err);
}
