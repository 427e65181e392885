import type {
  AvatarSummary,
  DesignPatch,
  PaintResult,
  PatternSummary,
  SessionRecord,
} from './types.js';

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = 'ApiError';
  }
}

function detailText(body: unknown): string {
  if (body && typeof body === 'object' && 'detail' in body) {
    const detail = (body as { detail: unknown }).detail;
    if (typeof detail === 'string') return detail;
    if (Array.isArray(detail)) {
      return detail
        .map((d) => (d && typeof d === 'object' ? `${(d as any).field}: ${(d as any).message}` : String(d)))
        .join('; ');
    }
  }
  return 'request failed';
}

/** Thin typed wrapper over the studio HTTP API. The fetch implementation is
 * injectable so tests can instrument or stub the transport. */
export class StudioApiClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchImpl: typeof fetch = fetch,
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const resp = await this.fetchImpl(`${this.baseUrl}${path}`, {
      method,
      headers: body === undefined ? undefined : { 'Content-Type': 'application/json' },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!resp.ok) {
      let parsed: unknown = null;
      try {
        parsed = await resp.json();
      } catch {
        // non-JSON error body; fall through to the generic message
      }
      throw new ApiError(resp.status, detailText(parsed));
    }
    return (await resp.json()) as T;
  }

  private async requestBytes(method: string, path: string, body?: unknown): Promise<Uint8Array> {
    const resp = await this.fetchImpl(`${this.baseUrl}${path}`, {
      method,
      headers: body === undefined ? undefined : { 'Content-Type': 'application/json' },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!resp.ok) {
      let parsed: unknown = null;
      try {
        parsed = await resp.json();
      } catch {
        // ignore
      }
      throw new ApiError(resp.status, detailText(parsed));
    }
    return new Uint8Array(await resp.arrayBuffer());
  }

  listPatterns(): Promise<PatternSummary[]> {
    return this.request('GET', '/api/patterns');
  }

  createSession(patternId: string): Promise<SessionRecord> {
    return this.request('POST', '/api/sessions', { pattern_id: patternId });
  }

  getSession(sessionId: string): Promise<SessionRecord> {
    return this.request('GET', `/api/sessions/${sessionId}`);
  }

  generatePaint(sessionId: string, prompt: string): Promise<PaintResult> {
    return this.request('POST', `/api/sessions/${sessionId}/paint`, { prompt });
  }

  patchDesign(sessionId: string, expectedRevision: number, patch: DesignPatch): Promise<SessionRecord> {
    return this.request('PATCH', `/api/sessions/${sessionId}/design`, {
      expected_revision: expectedRevision,
      ...patch,
    });
  }

  listAvatars(): Promise<AvatarSummary[]> {
    return this.request('GET', '/api/avatars');
  }

  /** Cache-busted by revision so an acknowledged PATCH refreshes the image. */
  renderUrl(sessionId: string, revision: number): string {
    return `${this.baseUrl}/api/sessions/${sessionId}/render?rev=${revision}`;
  }

  fetchRender(sessionId: string): Promise<Uint8Array> {
    return this.requestBytes('GET', `/api/sessions/${sessionId}/render`);
  }

  fetchBytes(path: string): Promise<Uint8Array> {
    return this.requestBytes('GET', path);
  }

  tryOn(sessionId: string, avatarId: string): Promise<Uint8Array> {
    return this.requestBytes('POST', `/api/sessions/${sessionId}/tryon`, { avatar_id: avatarId });
  }
}
