// Direct-placement board for 2-dim sessions: pick an item anywhere in
// the UI, then click a spot on the board to pin it at that (x, y) in
// [-1, 1] squared. Placing the same item again moves it.

import { ItemInfo } from "./api.js";

export class PlaceBoard {
  el: HTMLElement;
  onPlace: (id: string, x: number, y: number, clamped: boolean) => void;
  private selected: string | null = null;

  constructor(el: HTMLElement, onPlace: (id: string, x: number, y: number, clamped: boolean) => void) {
    this.el = el;
    this.onPlace = onPlace;
    el.classList.add("place-board");
    el.addEventListener("click", (e) => {
      if (!this.selected) return;
      const me = e as MouseEvent;
      const r = el.getBoundingClientRect();
      const w = r.width || 300;
      const h = r.height || 300;
      let x = 2 * (me.clientX - r.left) / w - 1;
      let y = 1 - 2 * (me.clientY - r.top) / h;
      const clamped = x < -1 || x > 1 || y < -1 || y > 1;
      x = Math.max(-1, Math.min(1, x));
      y = Math.max(-1, Math.min(1, y));
      this.onPlace(this.selected, x, y, clamped);
    });
  }

  select(id: string | null) {
    this.selected = id;
    this.el.classList.toggle("armed", id !== null);
    this.el.setAttribute("data-selected", id || "");
  }

  render(placements: Map<string, { x: number; y: number }>, items: Map<string, ItemInfo>) {
    this.el.textContent = "";
    const axes = document.createElement("div");
    axes.className = "axes";
    this.el.appendChild(axes);
    for (const [id, p] of placements) {
      const d = document.createElement("div");
      d.className = "pin";
      d.dataset.id = id;
      d.title = `${id} (${p.x.toFixed(2)}, ${p.y.toFixed(2)})`;
      d.style.left = `${(50 * (p.x + 1)).toFixed(2)}%`;
      d.style.top = `${(50 * (1 - p.y)).toFixed(2)}%`;
      const info = items.get(id);
      d.textContent = info && info.display ? "" : id.replace(/^.*?(\d+)$/, "$1");
      this.el.appendChild(d);
    }
  }
}
