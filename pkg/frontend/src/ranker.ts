// The rank strip: tie groups of item cards, pointer-driven drag with
// shift for ties, and arrow-key reordering. Drag uses pointer events
// rather than HTML5 drag-and-drop so touch works and the interaction is
// fully synthesizable in tests.

import { ItemInfo } from "./api.js";
import { DropSpot } from "./model.js";

export interface StripCallbacks {
  onDrop(id: string, spot: DropSpot, tie: boolean): void;
  onMove(id: string, dir: -1 | 1, merge: boolean): void;
  onJump?(id: string): void;
}

const DRAG_START_PX = 4;

export class RankStrip {
  el: HTMLElement;
  private cb: StripCallbacks;
  private pending = false;
  private dragId: string | null = null;
  private armed: { id: string; x: number; y: number } | null = null;
  private hover: DropSpot | null = null;
  private hoverTie = false;
  private sources: HTMLElement[] = [];

  constructor(el: HTMLElement, cb: StripCallbacks) {
    this.el = el;
    this.cb = cb;
    el.classList.add("rank-strip");
    el.addEventListener("pointerdown", (e) => this.pointerDown(e as PointerEvent));
    el.addEventListener("pointermove", (e) => this.pointerMove(e as PointerEvent));
    el.addEventListener("pointerup", (e) => this.pointerUp(e as PointerEvent));
    el.addEventListener("keydown", (e) => this.keyDown(e as KeyboardEvent));
    el.addEventListener("contextmenu", (e) => {
      const card = (e.target as HTMLElement).closest?.(".card") as HTMLElement | null;
      if (card && this.cb.onJump) {
        e.preventDefault();
        this.cb.onJump(card.dataset.id!);
      }
    });
    // A pointerup anywhere else ends this strip's gesture; without this a
    // drag released over another strip stays armed and a later buttonless
    // pointermove would resume it.
    document.addEventListener("pointerup", (e) => {
      const t = e.target as Node;
      if (this.el.contains(t) || this.sources.some((s) => s.contains(t))) return;
      this.armed = null;
      if (this.dragId) {
        this.dragId = null;
        this.el.classList.remove("dragging");
        this.clearHoverMarks();
        this.hover = null;
      }
    });
  }

  // Cards elsewhere (the suggestion tray) can start drags into this strip.
  adoptSource(container: HTMLElement) {
    this.sources.push(container);
    container.addEventListener("pointerdown", (e) => this.pointerDown(e as PointerEvent));
    container.addEventListener("pointerup", (e) => this.pointerUp(e as PointerEvent));
  }

  render(groups: string[][], items: Map<string, ItemInfo>, pending: boolean) {
    this.pending = pending;
    this.el.classList.toggle("pending", pending);
    this.el.textContent = "";
    this.el.appendChild(this.gap(0));
    groups.forEach((group, gi) => {
      const g = document.createElement("div");
      g.className = "group";
      g.dataset.gi = String(gi);
      for (const id of group) {
        g.appendChild(this.card(id, gi, items.get(id)));
      }
      this.el.appendChild(g);
      this.el.appendChild(this.gap(gi + 1));
    });
    if (!groups.length) {
      const hint = document.createElement("span");
      hint.className = "hint";
      hint.textContent = "drag items here to rank them";
      this.el.appendChild(hint);
    }
  }

  private card(id: string, gi: number, info?: ItemInfo): HTMLElement {
    const c = document.createElement("div");
    c.className = "card";
    c.tabIndex = this.pending ? -1 : 0;
    c.dataset.id = id;
    c.dataset.gi = String(gi);
    c.setAttribute("role", "option");
    if (this.pending) c.setAttribute("aria-disabled", "true");
    if (info && info.display) {
      const img = document.createElement("img");
      img.src = info.display;
      img.alt = id;
      c.appendChild(img);
    } else {
      c.textContent = id;
    }
    c.title = id;
    return c;
  }

  private gap(at: number): HTMLElement {
    const s = document.createElement("span");
    s.className = "gap";
    s.dataset.at = String(at);
    return s;
  }

  private pointerDown(e: PointerEvent) {
    if (this.pending) return;
    const card = (e.target as HTMLElement).closest?.("[data-id]") as HTMLElement | null;
    if (!card) return;
    this.armed = { id: card.dataset.id!, x: e.clientX, y: e.clientY };
  }

  private pointerMove(e: PointerEvent) {
    if (this.armed && !this.dragId) {
      const moved = Math.abs(e.clientX - this.armed.x) + Math.abs(e.clientY - this.armed.y);
      if (moved >= DRAG_START_PX) {
        this.dragId = this.armed.id;
        this.el.classList.add("dragging");
      }
    }
    if (!this.dragId) return;
    this.trackHover(e);
  }

  private trackHover(e: PointerEvent) {
    this.clearHoverMarks();
    const t = e.target as HTMLElement;
    const gapEl = t.closest?.(".gap") as HTMLElement | null;
    if (gapEl && this.el.contains(gapEl)) {
      this.hover = { at: Number(gapEl.dataset.at), into: false };
      this.hoverTie = false;
      gapEl.classList.add("hover");
      return;
    }
    const card = t.closest?.(".rank-strip .card") as HTMLElement | null;
    if (card && this.el.contains(card)) {
      const gi = Number(card.dataset.gi);
      if (e.shiftKey) {
        this.hover = { at: gi, into: true };
        this.hoverTie = true;
        card.parentElement!.classList.add("hover-into");
      } else {
        const r = card.getBoundingClientRect();
        const before = e.clientX < r.left + r.width / 2;
        this.hover = { at: before ? gi : gi + 1, into: false };
        this.hoverTie = false;
        card.classList.add(before ? "hover-before" : "hover-after");
      }
      return;
    }
    if (t === this.el || this.el.contains(t)) {
      // open strip area: drop at the end
      this.hover = { at: Number.MAX_SAFE_INTEGER, into: false };
      this.hoverTie = false;
    }
  }

  private pointerUp(e: PointerEvent) {
    const armed = this.armed;
    this.armed = null;
    if (!this.dragId) {
      // a tap, not a drag; taps on empty strip do nothing
      if (armed) this.clearHoverMarks();
      return;
    }
    const id = this.dragId;
    this.dragId = null;
    this.el.classList.remove("dragging");
    this.trackHover(e);
    const spot = this.hover;
    this.clearHoverMarks();
    this.hover = null;
    if (!this.pending && spot) {
      this.cb.onDrop(id, spot, this.hoverTie);
    }
  }

  private keyDown(e: KeyboardEvent) {
    if (this.pending) return;
    const card = (e.target as HTMLElement).closest?.(".card") as HTMLElement | null;
    if (!card) return;
    let dir: -1 | 1;
    if (e.key === "ArrowLeft" || e.key === "ArrowUp") dir = -1;
    else if (e.key === "ArrowRight" || e.key === "ArrowDown") dir = 1;
    else return;
    e.preventDefault();
    this.cb.onMove(card.dataset.id!, dir, e.shiftKey);
  }

  private clearHoverMarks() {
    for (const el of this.el.querySelectorAll(".hover, .hover-into, .hover-before, .hover-after")) {
      el.classList.remove("hover", "hover-into", "hover-before", "hover-after");
    }
  }

  // Restore focus to a card after a re-render, for keyboard flows.
  focusCard(id: string) {
    const card = this.el.querySelector(`.card[data-id="${id}"]`) as HTMLElement | null;
    if (card) card.focus();
  }
}
