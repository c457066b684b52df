/** Canonical timecode formatting, matching the service's HH:MM:SS[.mmm] form. */

export function formatTimecode(ms: number): string {
  if (!Number.isFinite(ms) || ms < 0) throw new Error(`negative timecode: ${ms}`);
  const total = Math.round(ms);
  const hours = Math.floor(total / 3_600_000);
  const minutes = Math.floor((total % 3_600_000) / 60_000);
  const seconds = Math.floor((total % 60_000) / 1000);
  const millis = total % 1000;
  const pad = (n: number) => String(n).padStart(2, "0");
  const base = `${pad(hours)}:${pad(minutes)}:${pad(seconds)}`;
  return millis === 0 ? base : `${base}.${String(millis).padStart(3, "0")}`;
}

export function clamp(v: number, lo: number, hi: number): number {
  return v < lo ? lo : v > hi ? hi : v;
}
