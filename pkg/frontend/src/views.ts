// The three ways of looking at the live ordering: a raster grid in page
// order, a continuous scale where spacing follows the criterion values,
// and a zoomable scatter of the (pseudo-)criteria space.

import { ItemInfo, OrderingRow } from "./api.js";
import { Viewport } from "./model.js";

function chip(id: string, info: ItemInfo | undefined, ranked: boolean): HTMLElement {
  const c = document.createElement("div");
  c.className = ranked ? "chip ranked" : "chip";
  c.dataset.id = id;
  c.title = id;
  if (info && info.display) {
    const img = document.createElement("img");
    img.src = info.display;
    img.alt = id;
    c.appendChild(img);
  } else {
    c.textContent = id.replace(/^.*?(\d+)$/, "$1") || id;
  }
  return c;
}

export class GridView {
  el: HTMLElement;
  onSelect: (id: string) => void;

  constructor(el: HTMLElement, onSelect: (id: string) => void) {
    this.el = el;
    this.onSelect = onSelect;
    el.classList.add("grid-view");
    el.addEventListener("click", (e) => {
      const c = (e.target as HTMLElement).closest?.(".chip") as HTMLElement | null;
      if (c) this.onSelect(c.dataset.id!);
    });
  }

  render(ordering: OrderingRow[], ranked: Set<string>, items: Map<string, ItemInfo>) {
    this.el.textContent = "";
    for (const row of ordering) {
      this.el.appendChild(chip(row.id, items.get(row.id), ranked.has(row.id)));
    }
  }
}

// Greedy row assignment: items closer than `gap` (in normalized scale
// units) stack onto new rows instead of overlapping.
export function stackRows(xs: number[], gap: number): number[] {
  const lastAt: number[] = [];
  const rows: number[] = [];
  for (const x of xs) {
    let row = 0;
    while (row < lastAt.length && x - lastAt[row] < gap) row++;
    lastAt[row] = x;
    rows.push(row);
  }
  return rows;
}

export class ScaleView {
  el: HTMLElement;
  onSelect: (id: string) => void;

  constructor(el: HTMLElement, onSelect: (id: string) => void) {
    this.el = el;
    this.onSelect = onSelect;
    el.classList.add("scale-view");
    el.addEventListener("click", (e) => {
      const c = (e.target as HTMLElement).closest?.(".chip") as HTMLElement | null;
      if (c) this.onSelect(c.dataset.id!);
    });
  }

  render(ordering: OrderingRow[], ranked: Set<string>, items: Map<string, ItemInfo>) {
    this.el.textContent = "";
    if (!ordering.length) return;
    const f = ordering.map((r) => r.f[0]);
    const lo = Math.min(...f);
    const hi = Math.max(...f);
    const span = hi - lo;
    const xs = f.map((v) => (span > 0 ? (v - lo) / span : 0.5));
    const rows = stackRows(xs, 0.012);
    const depth = Math.max(...rows) + 1;
    this.el.style.height = `${Math.min(depth, 24) * 16 + 24}px`;
    ordering.forEach((row, i) => {
      const c = chip(row.id, items.get(row.id), ranked.has(row.id));
      c.classList.add("scale-chip");
      c.style.left = `${(xs[i] * 96 + 2).toFixed(3)}%`;
      c.style.top = `${rows[i] * 16 + 4}px`;
      this.el.appendChild(c);
    });
  }
}

const SVG = "http://www.w3.org/2000/svg";

// Stable pseudo-random vertical jitter for 1-dim sessions.
export function jitter(id: string): number {
  let h = 2166136261;
  for (let i = 0; i < id.length; i++) {
    h = (h ^ id.charCodeAt(i)) * 16777619 >>> 0;
  }
  return 0.1 + 0.8 * (h % 1000) / 999;
}

export class ScatterView {
  el: HTMLElement;
  svg: SVGSVGElement;
  viewport: Viewport;
  onSelect: (id: string) => void;
  onViewport: (v: Viewport) => void;
  private pts = new Map<string, { x: number; y: number }>();
  private panFrom: { px: number; py: number; x: number; y: number } | null = null;

  constructor(el: HTMLElement, onSelect: (id: string) => void,
              onViewport: (v: Viewport) => void) {
    this.el = el;
    this.onSelect = onSelect;
    this.onViewport = onViewport;
    this.viewport = { x: 0, y: 0, z: 1 };
    el.classList.add("scatter-view");
    this.svg = document.createElementNS(SVG, "svg") as SVGSVGElement;
    this.svg.setAttribute("preserveAspectRatio", "xMidYMid meet");
    el.appendChild(this.svg);

    this.svg.addEventListener("wheel", (e) => {
      e.preventDefault();
      const we = e as WheelEvent;
      const factor = we.deltaY < 0 ? 1.25 : 0.8;
      this.zoomAbout(0.5, 0.5, factor);
    });
    this.svg.addEventListener("pointerdown", (e) => {
      const pe = e as PointerEvent;
      this.panFrom = { px: pe.clientX, py: pe.clientY,
                       x: this.viewport.x, y: this.viewport.y };
    });
    this.svg.addEventListener("pointermove", (e) => {
      if (!this.panFrom) return;
      const pe = e as PointerEvent;
      const w = this.svg.clientWidth || 600;
      const scale = 1 / (this.viewport.z * w);
      this.viewport.x = this.panFrom.x - (pe.clientX - this.panFrom.px) * scale;
      this.viewport.y = this.panFrom.y - (pe.clientY - this.panFrom.py) * scale;
      this.applyViewBox();
    });
    this.svg.addEventListener("pointerup", (e) => {
      const pe = e as PointerEvent;
      const moved = this.panFrom &&
        Math.abs(pe.clientX - this.panFrom.px) + Math.abs(pe.clientY - this.panFrom.py) > 3;
      this.panFrom = null;
      if (moved) {
        this.onViewport({ ...this.viewport });
        return;
      }
      const dot = (e.target as HTMLElement).closest?.("circle[data-id]") as SVGElement | null;
      if (dot) this.onSelect(dot.getAttribute("data-id")!);
    });
  }

  private zoomAbout(cx: number, cy: number, factor: number) {
    const v = this.viewport;
    const z = Math.min(40, Math.max(0.5, v.z * factor));
    const wasW = 1 / v.z;
    const nowW = 1 / z;
    v.x += (wasW - nowW) * cx;
    v.y += (wasW - nowW) * cy;
    v.z = z;
    this.applyViewBox();
    this.onViewport({ ...v });
  }

  private applyViewBox() {
    const v = this.viewport;
    const w = 1 / v.z;
    this.svg.setAttribute("viewBox", `${v.x} ${v.y} ${w} ${w}`);
    const r = 0.008 / Math.sqrt(v.z);
    for (const c of this.svg.querySelectorAll("circle")) {
      c.setAttribute("r", String(r));
    }
  }

  centerOn(id: string) {
    const p = this.pts.get(id);
    if (!p) return;
    const v = this.viewport;
    if (v.z < 4) v.z = 4;
    const w = 1 / v.z;
    v.x = p.x - w / 2;
    v.y = p.y - w / 2;
    this.applyViewBox();
    this.onViewport({ ...v });
  }

  render(ordering: OrderingRow[], ranked: Set<string>, dims: 1 | 2, viewport: Viewport) {
    this.viewport = { ...viewport };
    this.svg.textContent = "";
    this.pts.clear();
    if (!ordering.length) { this.applyViewBox(); return; }
    const f0 = ordering.map((r) => r.f[0]);
    const lo0 = Math.min(...f0);
    const span0 = Math.max(...f0) - lo0 || 1;
    let lo1 = 0;
    let span1 = 1;
    if (dims === 2) {
      const f1 = ordering.map((r) => r.f[1]);
      lo1 = Math.min(...f1);
      span1 = Math.max(...f1) - lo1 || 1;
    }
    for (const row of ordering) {
      const x = 0.04 + 0.92 * (row.f[0] - lo0) / span0;
      const y = dims === 2
        ? 0.96 - 0.92 * (row.f[1] - lo1) / span1
        : jitter(row.id);
      this.pts.set(row.id, { x, y });
      const c = document.createElementNS(SVG, "circle");
      c.setAttribute("cx", String(x));
      c.setAttribute("cy", String(y));
      c.setAttribute("data-id", row.id);
      c.setAttribute("class", ranked.has(row.id) ? "dot ranked" : "dot rest");
      const title = document.createElementNS(SVG, "title");
      title.textContent = row.id;
      c.appendChild(title);
      this.svg.appendChild(c);
    }
    this.applyViewBox();
  }
}
