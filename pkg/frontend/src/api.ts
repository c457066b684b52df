/** Typed client for the timeline service.
 *
 * Layout requests are serialized: starting a new one aborts the previous,
 * so gestures never race older responses onto the screen.
 */

import type { AnnotationDetail, LayoutJson, PackageSummary, ServiceError } from "./types.js";

export class ApiError extends Error {
  readonly code: string;
  readonly position: number | undefined;
  readonly status: number;

  constructor(status: number, body: ServiceError) {
    super(body.message);
    this.status = status;
    this.code = body.code;
    this.position = body.position;
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

async function raiseForStatus(response: Response): Promise<Response> {
  if (response.ok) return response;
  let body: ServiceError;
  try {
    body = (await response.json()) as ServiceError;
  } catch {
    body = { code: "http_error", message: `HTTP ${response.status}` };
  }
  throw new ApiError(response.status, body);
}

export class ApiClient {
  private readonly base: string;
  private readonly fetchImpl: FetchLike;
  private layoutAbort: AbortController | null = null;

  constructor(base = "", fetchImpl: FetchLike = (u, i) => fetch(u, i)) {
    this.base = base.replace(/\/$/, "");
    this.fetchImpl = fetchImpl;
  }

  async getSummary(packageId: string): Promise<PackageSummary> {
    const r = await raiseForStatus(await this.fetchImpl(`${this.base}/packages/${packageId}`));
    return (await r.json()) as PackageSummary;
  }

  /** Fetch a layout; any in-flight layout request is aborted first. */
  async getLayout(packageId: string, config: string, widthPx: number): Promise<LayoutJson> {
    this.layoutAbort?.abort();
    const abort = new AbortController();
    this.layoutAbort = abort;
    const query = config ? `${config}&width=${widthPx}` : `width=${widthPx}`;
    const r = await raiseForStatus(
      await this.fetchImpl(`${this.base}/packages/${packageId}/timeline.json?${query}`, {
        signal: abort.signal,
      }),
    );
    return (await r.json()) as LayoutJson;
  }

  async getAnnotation(packageId: string, annotationId: string): Promise<AnnotationDetail> {
    const r = await raiseForStatus(
      await this.fetchImpl(`${this.base}/packages/${packageId}/annotations/${annotationId}`),
    );
    return (await r.json()) as AnnotationDetail;
  }

  /** The service-side canonical form of a configuration string. */
  async canonicalize(config: string): Promise<string> {
    const r = await raiseForStatus(
      await this.fetchImpl(`${this.base}/canonical${config ? `?${config}` : ""}`),
    );
    return await r.text();
  }
}

export function isAbort(error: unknown): boolean {
  return error instanceof DOMException && error.name === "AbortError";
}
