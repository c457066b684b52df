/** Video <-> timeline synchronization.
 *
 * A vertical line tracks the video's currentTime at display refresh rate;
 * clicking the timeline seeks the video to the clicked time. When the media
 * URI cannot be loaded the video pane is hidden and the timeline keeps
 * working on its own.
 */

import { timeToPx, type TimeWindow } from "./viewport.js";

export class PlayheadSync {
  private video: HTMLVideoElement;
  private rafId: number | null = null;

  constructor(video: HTMLVideoElement) {
    this.video = video;
  }

  /** Start the refresh loop; `line` is re-queried each frame via accessor. */
  start(
    getLine: () => SVGLineElement | null,
    getWindow: () => (TimeWindow & { widthPx: number; gutterPx: number }) | null,
    onVisiblePx?: (x: number) => void,
  ): void {
    const step = () => {
      const line = getLine();
      const win = getWindow();
      if (line && win) {
        const t = this.video.currentTime * 1000;
        if (t >= win.from && t <= win.to) {
          const x = win.gutterPx + timeToPx(t, win, win.widthPx);
          line.setAttribute("x1", String(x));
          line.setAttribute("x2", String(x));
          line.setAttribute("visibility", "visible");
          onVisiblePx?.(x);
        } else {
          line.setAttribute("visibility", "hidden");
        }
      }
      this.rafId = requestAnimationFrame(step);
    };
    this.rafId = requestAnimationFrame(step);
  }

  stop(): void {
    if (this.rafId !== null) cancelAnimationFrame(this.rafId);
    this.rafId = null;
  }

  seekToMs(t: number): void {
    this.video.currentTime = t / 1000;
  }
}
