/** Application shell: DOM wiring around the store.
 *
 * Pan: pointer drag. Zoom: wheel (1.25x per notch around the cursor).
 * Track visibility and order: sidebar controls. Advanced edits: the raw
 * configuration field. The URL fragment always carries the canonical
 * configuration once an interaction settles.
 */

import { ApiClient, ApiError } from "./api.js";
import { debounce } from "./debounce.js";
import { LastTrackError } from "./params.js";
import { PlayheadSync } from "./playhead.js";
import { hitTest, renderTimeline } from "./render.js";
import { AppStore, type Snapshot } from "./state.js";
import { formatTimecode } from "./timecode.js";
import { buildAppHash, parseAppHash } from "./urlstate.js";
import { pxToTime } from "./viewport.js";

function byId<T extends HTMLElement>(id: string): T {
  return document.getElementById(id) as T;
}

function renderError(snap: Snapshot): void {
  const banner = byId<HTMLDivElement>("error-banner");
  if (!snap.fragmentError) {
    banner.hidden = true;
    return;
  }
  banner.hidden = false;
  const { fragment, position, message } = snap.fragmentError;
  banner.textContent = "";
  const title = document.createElement("div");
  title.className = "error-message";
  title.textContent = `Configuration error: ${message} — showing defaults`;
  banner.appendChild(title);
  if (position !== undefined) {
    const pre = document.createElement("pre");
    pre.className = "error-fragment";
    pre.textContent = `${fragment}\n${" ".repeat(Math.min(position, fragment.length))}^`;
    banner.appendChild(pre);
  }
}

function renderDetail(snap: Snapshot): void {
  const panel = byId<HTMLDivElement>("detail-panel");
  panel.textContent = "";
  if (snap.notice) {
    const note = document.createElement("p");
    note.className = "notice";
    note.textContent = snap.notice;
    panel.appendChild(note);
    return;
  }
  const sel = snap.selection;
  if (!sel) return;
  if (sel.kind === "bin") {
    const note = document.createElement("p");
    note.className = "notice";
    note.textContent = `${sel.binCount} annotations — zoom in to inspect them`;
    panel.appendChild(note);
    return;
  }
  const d = sel.detail!;
  const rows: [string, string][] = [
    ["Type", d.typeLabel],
    ["Begin", d.beginTimecode],
    ["End", d.endTimecode],
    ["Value", d.value.text],
  ];
  const heading = document.createElement("h3");
  heading.textContent = d.id;
  panel.appendChild(heading);
  const dl = document.createElement("dl");
  for (const [k, v] of rows) {
    const dt = document.createElement("dt");
    dt.textContent = k;
    const dd = document.createElement("dd");
    dd.textContent = v;
    dl.appendChild(dt);
    dl.appendChild(dd);
  }
  panel.appendChild(dl);
}

function renderTrackControls(store: AppStore, snap: Snapshot): void {
  const list = byId<HTMLUListElement>("track-list");
  list.textContent = "";
  if (!snap.summary) return;
  const displayed = store.displayedTracks();
  const orderOf = new Map(displayed.map((t, i) => [t, i]));
  for (const t of snap.summary.types) {
    const item = document.createElement("li");
    const label = document.createElement("label");
    const box = document.createElement("input");
    box.type = "checkbox";
    box.checked = orderOf.has(t.id);
    box.addEventListener("change", () => {
      store.toggle(t.id).catch((error) => {
        if (error instanceof LastTrackError) {
          box.checked = true;
          store.showNotice(error.message);
        } else {
          throw error;
        }
      });
    });
    label.appendChild(box);
    label.appendChild(document.createTextNode(` ${t.label} (${t.annotationCount})`));
    item.appendChild(label);
    if (orderOf.has(t.id)) {
      const up = document.createElement("button");
      up.textContent = "↑";
      up.title = "move up";
      up.addEventListener("click", () => {
        void store.reorder(t.id, Math.max(0, orderOf.get(t.id)! - 1));
      });
      const down = document.createElement("button");
      down.textContent = "↓";
      down.title = "move down";
      down.addEventListener("click", () => {
        void store.reorder(t.id, orderOf.get(t.id)! + 1);
      });
      item.appendChild(up);
      item.appendChild(down);
    }
    list.appendChild(item);
  }
}

export function boot(): void {
  const { packageId, fragment } = parseAppHash(location.hash);
  const stage = byId<HTMLDivElement>("stage");
  if (!packageId) {
    stage.textContent = "No package selected. Open /#/packages/{id}.";
    return;
  }
  const api = new ApiClient("");
  const store = new AppStore(api, packageId);
  const settleUrl = debounce((canonical: string) => {
    history.replaceState(null, "", buildAppHash(packageId, canonical));
  }, 250);
  store.onFragmentSettled = (canonical) => settleUrl(canonical);

  const video = byId<HTMLVideoElement>("video");
  const playhead = new PlayheadSync(video);

  store.subscribe((snap) => {
    renderError(snap);
    renderDetail(snap);
    renderTrackControls(store, snap);
    byId<HTMLInputElement>("dsl-input").value = snap.fragment;
    if (snap.layout) {
      const selected = snap.selection?.detail?.id ?? null;
      const svg = renderTimeline(snap.layout, selected);
      stage.textContent = "";
      stage.appendChild(svg);
    }
  });

  // --- timeline gestures ---
  let dragging = false;
  let dragStartX = 0;
  let dragMoved = false;
  const settleAfterGesture = debounce(() => void store.settleFragment(), 300);

  stage.addEventListener("pointerdown", (e) => {
    dragging = true;
    dragMoved = false;
    dragStartX = e.clientX;
  });
  stage.addEventListener("pointermove", (e) => {
    if (!dragging) return;
    const delta = dragStartX - e.clientX;
    if (Math.abs(delta) < 3 && !dragMoved) return;
    dragMoved = true;
    dragStartX = e.clientX;
    void store.pan(delta);
    settleAfterGesture();
  });
  const endDrag = () => {
    dragging = false;
  };
  stage.addEventListener("pointerup", endDrag);
  stage.addEventListener("pointerleave", endDrag);

  stage.addEventListener("wheel", (e) => {
    e.preventDefault();
    const snap = store.snapshot();
    if (!snap.layout) return;
    const rect = stage.getBoundingClientRect();
    const anchorPx = e.clientX - rect.left - snap.layout.gutterPx;
    if (anchorPx < 0) return;
    void store.zoom(anchorPx, e.deltaY < 0 ? 1 : -1);
    settleAfterGesture();
  });

  stage.addEventListener("click", (e) => {
    if (dragMoved) return; // drag release, not a click
    const hit = hitTest(e.target as Element);
    if (hit.kind === "annotation") {
      void store.selectAnnotation(hit.id);
      const snap = store.snapshot();
      if (snap.layout && video.dataset.ok === "1") {
        // clicking also seeks the video to the clicked time
        const rect = stage.getBoundingClientRect();
        const x = e.clientX - rect.left - snap.layout.gutterPx;
        if (x >= 0) {
          playhead.seekToMs(pxToTime(x, snap.layout.viewport, snap.layout.viewport.widthPx));
        }
      }
    } else if (hit.kind === "bin") {
      store.selectBin(hit.count);
    } else {
      store.clearSelection();
      const snap = store.snapshot();
      if (snap.layout && video.dataset.ok === "1") {
        const rect = stage.getBoundingClientRect();
        const x = e.clientX - rect.left - snap.layout.gutterPx;
        if (x >= 0) {
          playhead.seekToMs(pxToTime(x, snap.layout.viewport, snap.layout.viewport.widthPx));
        }
      }
    }
  });

  // --- raw DSL field ---
  byId<HTMLFormElement>("dsl-form").addEventListener("submit", (e) => {
    e.preventDefault();
    void store.applyRawFragment(byId<HTMLInputElement>("dsl-input").value);
  });

  byId<HTMLInputElement>("follow-toggle").addEventListener("change", (e) => {
    store.followPlayhead = (e.target as HTMLInputElement).checked;
  });

  // --- width from the window ---
  const applyWidth = () => {
    const w = Math.max(100, stage.clientWidth - 160);
    store.setWidth(w);
  };
  applyWidth();
  window.addEventListener("resize", debounce(() => {
    applyWidth();
    void store.refreshLayout();
  }, 200));

  // --- boot ---
  void store.init(fragment).then(() => {
    const snap = store.snapshot();
    const uri = snap.summary?.media.uri ?? "";
    if (uri) {
      video.src = uri;
      video.addEventListener("loadedmetadata", () => {
        video.dataset.ok = "1";
        byId<HTMLDivElement>("video-pane").hidden = false;
        playhead.start(
          () => stage.querySelector<SVGLineElement>("line.playhead"),
          () => {
            const s = store.snapshot();
            if (!s.layout) return null;
            return { ...s.layout.viewport, gutterPx: s.layout.gutterPx };
          },
          (x) => {
            if (store.followPlayhead) {
              const s = store.snapshot();
              if (s.layout && x > s.layout.gutterPx + s.layout.viewport.widthPx * 0.95) {
                void store.pan(s.layout.viewport.widthPx * 0.5);
                settleAfterGesture();
              }
            }
          },
        );
      });
      video.addEventListener("error", () => {
        byId<HTMLDivElement>("video-pane").hidden = true;
      });
    }
    const media = snap.summary?.media;
    if (media) {
      byId<HTMLSpanElement>("media-info").textContent =
        `${media.id} · ${formatTimecode(media.duration)}`;
    }
  }).catch((error: unknown) => {
    if (error instanceof ApiError && error.status === 404) {
      stage.textContent = `Unknown package: ${packageId}`;
    } else {
      stage.textContent = `Failed to load: ${String(error)}`;
    }
  });

  window.addEventListener("hashchange", () => {
    const next = parseAppHash(location.hash);
    if (next.packageId !== packageId) {
      location.reload();
      return;
    }
    if (next.fragment !== store.snapshot().fragment) {
      void store.applyRawFragment(next.fragment);
    }
  });
}

if (typeof document !== "undefined" && document.getElementById("stage")) {
  boot();
}
