// Suggestion tray: the top-n items the active learner wants labeled,
// with their gains. Cards drag into the rank strip; Enter (or the add
// button) appends one at the good end as a starting point.

import { ItemInfo, Suggestion } from "./api.js";

export class SuggestionTray {
  el: HTMLElement;
  onAccept: (id: string) => void;

  constructor(el: HTMLElement, onAccept: (id: string) => void) {
    this.el = el;
    this.onAccept = onAccept;
    el.classList.add("tray");
    el.addEventListener("keydown", (e) => {
      const ke = e as KeyboardEvent;
      const card = (ke.target as HTMLElement).closest?.(".card") as HTMLElement | null;
      if (card && ke.key === "Enter") {
        ke.preventDefault();
        this.onAccept(card.dataset.id!);
      }
    });
    el.addEventListener("dblclick", (e) => {
      const card = (e.target as HTMLElement).closest?.(".card") as HTMLElement | null;
      if (card) this.onAccept(card.dataset.id!);
    });
  }

  render(suggestions: Suggestion[], items: Map<string, ItemInfo>, pending: boolean) {
    this.el.textContent = "";
    this.el.classList.toggle("pending", pending);
    const top = suggestions.length ? suggestions[0].gain : 0;
    for (const s of suggestions) {
      const c = document.createElement("div");
      c.className = "card";
      c.tabIndex = pending ? -1 : 0;
      c.dataset.id = s.id;
      c.dataset.gain = String(s.gain);
      const info = items.get(s.id);
      if (info && info.display) {
        const img = document.createElement("img");
        img.src = info.display;
        img.alt = s.id;
        c.appendChild(img);
      } else {
        const label = document.createElement("span");
        label.textContent = s.id;
        c.appendChild(label);
      }
      const bar = document.createElement("div");
      bar.className = "gain";
      bar.style.width = `${top > 0 ? Math.round(100 * s.gain / top) : 0}%`;
      bar.title = `gain ${s.gain.toExponential(2)}`;
      c.appendChild(bar);
      this.el.appendChild(c);
    }
  }
}
