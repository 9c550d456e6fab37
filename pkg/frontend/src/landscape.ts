import { colorFor } from "./palette.js";
import type { LandscapePayload, LandscapePoint } from "./types.js";

/** The part of CanvasRenderingContext2D the scatter actually uses,
 *  narrow enough to fake in tests. */
export interface Scatter2D {
  // union matches the real canvas property; only strings are ever assigned
  fillStyle: string | CanvasGradient | CanvasPattern;
  font: string;
  textAlign: CanvasTextAlign;
  clearRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  fill(): void;
  fillText(text: string, x: number, y: number): void;
}

export interface Mark {
  uid: string;
  topic: number;
  px: number;
  py: number;
  color: string;
}

const MARGIN = 14;
const RADIUS = 4;

/** Canvas scatter of the 2D landscape: one mark per paper, colored by
 *  topic, outliers (topic -1) light gray. */
export class LandscapeView {
  private marks: Mark[] = [];

  constructor(
    private readonly ctx: Scatter2D,
    private readonly width: number,
    private readonly height: number,
  ) {}

  render(payload: LandscapePayload): Mark[] {
    this.ctx.clearRect(0, 0, this.width, this.height);
    if (payload.points.length === 0) {
      this.marks = [];
      this.ctx.fillStyle = "#888888";
      this.ctx.font = "14px sans-serif";
      this.ctx.textAlign = "center";
      this.ctx.fillText("No landscape yet", this.width / 2, this.height / 2);
      return this.marks;
    }
    this.marks = this.layout(payload.points);
    // draw assigned marks first so gray outliers stay visible on top
    const ordered = [...this.marks].sort((a, b) =>
      a.topic === -1 && b.topic !== -1 ? 1 : b.topic === -1 && a.topic !== -1 ? -1 : 0,
    );
    for (const mark of ordered) {
      this.ctx.fillStyle = mark.color;
      this.ctx.beginPath();
      this.ctx.arc(mark.px, mark.py, RADIUS, 0, Math.PI * 2);
      this.ctx.fill();
    }
    return this.marks;
  }

  /** Nearest mark within the hover radius, or null. */
  hitTest(px: number, py: number): Mark | null {
    let best: Mark | null = null;
    let bestDist = Infinity;
    for (const mark of this.marks) {
      const d = Math.hypot(mark.px - px, mark.py - py);
      if (d < bestDist) {
        bestDist = d;
        best = mark;
      }
    }
    return bestDist <= RADIUS * 2 ? best : null;
  }

  private layout(points: LandscapePoint[]): Mark[] {
    let x0 = Infinity;
    let x1 = -Infinity;
    let y0 = Infinity;
    let y1 = -Infinity;
    for (const p of points) {
      x0 = Math.min(x0, p.x);
      x1 = Math.max(x1, p.x);
      y0 = Math.min(y0, p.y);
      y1 = Math.max(y1, p.y);
    }
    const spanX = x1 - x0 || 1;
    const spanY = y1 - y0 || 1;
    const w = this.width - 2 * MARGIN;
    const h = this.height - 2 * MARGIN;
    return points.map((p) => ({
      uid: p.uid,
      topic: p.topic,
      px: MARGIN + ((p.x - x0) / spanX) * w,
      // canvas y grows downward
      py: MARGIN + (1 - (p.y - y0) / spanY) * h,
      color: colorFor(p.topic),
    }));
  }
}

/** Legend items for the payload's topics plus an outlier row when any. */
export function legendEntries(
  payload: LandscapePayload,
): { id: number; label: string; color: string }[] {
  const entries = payload.topics.map((t) => ({
    id: t.id,
    label: `Topic ${t.id} (${t.size})`,
    color: colorFor(t.id),
  }));
  if (payload.outlier_count > 0) {
    entries.push({
      id: -1,
      label: `Outliers (${payload.outlier_count})`,
      color: colorFor(-1),
    });
  }
  return entries;
}
