/** Application state and transitions.
 *
 * The configuration fragment is the single source of truth for the view;
 * every mutation goes fragment -> service canonicalization -> layout fetch,
 * and listeners re-render from the resulting snapshot. Gestures update the
 * window eagerly but the URL is only rewritten (canonically) on settle.
 */

import { ApiClient, ApiError, isAbort } from "./api.js";
import {
  buildFragment,
  currentTracks,
  parseParams,
  toggleTrack,
  reorderTrack,
  withTracks,
  withWindow,
  type Param,
} from "./params.js";
import { panWindow, zoomWindow, type TimeWindow } from "./viewport.js";
import type { AnnotationDetail, LayoutJson, PackageSummary } from "./types.js";

export interface FragmentError {
  message: string;
  position: number | undefined;
  fragment: string;
}

export interface Selection {
  kind: "annotation" | "bin";
  detail?: AnnotationDetail;
  binCount?: number;
}

export interface Snapshot {
  packageId: string;
  summary: PackageSummary | null;
  layout: LayoutJson | null;
  fragment: string;
  fragmentError: FragmentError | null;
  selection: Selection | null;
  notice: string | null;
  followPlayhead: boolean;
}

type Listener = (snap: Snapshot) => void;

export class AppStore {
  private readonly api: ApiClient;
  private readonly packageId: string;
  private params: Param[] = [];
  private summary: PackageSummary | null = null;
  private layout: LayoutJson | null = null;
  private fragmentError: FragmentError | null = null;
  private selection: Selection | null = null;
  private notice: string | null = null;
  private widthPx = 1200;
  followPlayhead = false;
  private listeners: Listener[] = [];
  /** Set on every canonical settle; the shell mirrors it into the URL. */
  onFragmentSettled: ((fragment: string) => void) | null = null;

  constructor(api: ApiClient, packageId: string) {
    this.api = api;
    this.packageId = packageId;
  }

  subscribe(listener: Listener): void {
    this.listeners.push(listener);
  }

  snapshot(): Snapshot {
    return {
      packageId: this.packageId,
      summary: this.summary,
      layout: this.layout,
      fragment: buildFragment(this.params),
      fragmentError: this.fragmentError,
      selection: this.selection,
      notice: this.notice,
      followPlayhead: this.followPlayhead,
    };
  }

  private emit(): void {
    const snap = this.snapshot();
    for (const l of this.listeners) l(snap);
  }

  setWidth(widthPx: number): void {
    this.widthPx = Math.max(100, Math.min(20000, Math.round(widthPx)));
  }

  get width(): number {
    return this.widthPx;
  }

  /** Boot: validate the fragment against the service, then load the view. */
  async init(rawFragment: string): Promise<void> {
    this.summary = await this.api.getSummary(this.packageId);
    let canonical = "";
    try {
      canonical = await this.api.canonicalize(rawFragment);
      this.fragmentError = null;
    } catch (error) {
      if (error instanceof ApiError) {
        this.fragmentError = {
          message: error.message,
          position: error.position,
          fragment: rawFragment,
        };
        canonical = ""; // fall back to the default view
      } else {
        throw error;
      }
    }
    this.params = parseParams(canonical);
    await this.refreshLayout();
    this.onFragmentSettled?.(canonical);
    this.emit();
  }

  async refreshLayout(): Promise<void> {
    try {
      this.layout = await this.api.getLayout(
        this.packageId, buildFragment(this.params), this.widthPx);
    } catch (error) {
      if (isAbort(error)) return; // a newer request took over
      throw error;
    }
    this.emit();
  }

  private window(): TimeWindow | null {
    if (!this.layout) return null;
    return { from: this.layout.viewport.from, to: this.layout.viewport.to };
  }

  private async applyWindow(next: TimeWindow): Promise<void> {
    const duration = this.summary?.media.duration ?? 0;
    this.params = withWindow(this.params, next.from, next.to, duration);
    await this.refreshLayout();
  }

  async pan(deltaPx: number): Promise<void> {
    const win = this.window();
    if (!win || !this.layout) return;
    await this.applyWindow(
      panWindow(win, deltaPx, this.layout.viewport.widthPx,
        this.summary?.media.duration ?? win.to));
  }

  async zoom(anchorPx: number, steps: number): Promise<void> {
    const win = this.window();
    if (!win || !this.layout) return;
    await this.applyWindow(
      zoomWindow(win, anchorPx, steps, this.layout.viewport.widthPx,
        this.summary?.media.duration ?? win.to));
  }

  /** Canonicalize the current fragment and hand it to the URL mirror. */
  async settleFragment(): Promise<void> {
    const canonical = await this.api.canonicalize(buildFragment(this.params));
    this.params = parseParams(canonical);
    this.onFragmentSettled?.(canonical);
    this.emit();
  }

  /** Replace the whole fragment from the raw-DSL text field. */
  async applyRawFragment(raw: string): Promise<void> {
    try {
      const canonical = await this.api.canonicalize(raw);
      this.fragmentError = null;
      this.params = parseParams(canonical);
      await this.refreshLayout();
      this.onFragmentSettled?.(canonical);
    } catch (error) {
      if (error instanceof ApiError) {
        this.fragmentError = { message: error.message, position: error.position, fragment: raw };
      } else {
        throw error;
      }
    }
    this.emit();
  }

  displayedTracks(): string[] {
    const order = this.summary?.types.map((t) => t.id) ?? [];
    return currentTracks(this.params, order);
  }

  async toggle(typeId: string): Promise<void> {
    const order = this.summary?.types.map((t) => t.id) ?? [];
    const next = toggleTrack(this.displayedTracks(), order, typeId);
    this.params = withTracks(this.params, next);
    await this.refreshLayout();
    await this.settleFragment();
  }

  async reorder(typeId: string, newIndex: number): Promise<void> {
    const next = reorderTrack(this.displayedTracks(), typeId, newIndex);
    this.params = withTracks(this.params, next);
    await this.refreshLayout();
    await this.settleFragment();
  }

  async selectAnnotation(annotationId: string): Promise<void> {
    const detail = await this.api.getAnnotation(this.packageId, annotationId);
    this.selection = { kind: "annotation", detail };
    this.emit();
  }

  selectBin(count: number): void {
    this.selection = { kind: "bin", binCount: count };
    this.emit();
  }

  clearSelection(): void {
    if (this.selection === null && this.notice === null) return;
    this.selection = null;
    this.notice = null;
    this.emit();
  }

  showNotice(text: string): void {
    this.notice = text;
    this.emit();
  }
}
