// Wires the strip, tray, views, and board to the session service. The
// server is the single source of truth: every acknowledged mutation is
// followed by a re-fetch of ordering and suggestions before the UI
// unlocks, and only one mutation is ever in flight.

import { ApiError, Client, ItemInfo } from "./api.js";
import {
  DropSpot, ViewMode, ViewState, applyDrop, freshState, moveItem,
  placementsBody, rankedIds, rankingBody,
} from "./model.js";
import { RankStrip } from "./ranker.js";
import { SuggestionTray } from "./tray.js";
import { GridView, ScaleView, ScatterView } from "./views.js";
import { PlaceBoard } from "./place2d.js";

const MODES: ViewMode[] = ["raster-grid", "continuous-scale", "2d-scatter"];

export class App {
  client: Client;
  state: ViewState;
  items = new Map<string, ItemInfo>();
  root: HTMLElement;
  stripX!: RankStrip;
  stripY!: RankStrip;
  tray!: SuggestionTray;
  grid!: GridView;
  scale!: ScaleView;
  scatter!: ScatterView;
  board!: PlaceBoard;

  constructor(root: HTMLElement, client: Client) {
    this.root = root;
    this.client = client;
    this.state = freshState("", 1);
    this.buildDom();
  }

  private buildDom() {
    const r = this.root;
    r.innerHTML = `
      <header>
        <h1>criteria session</h1>
        <span id="session-label"></span>
        <span id="notice" role="status"></span>
      </header>
      <section class="rank north">
        <label>rank</label>
        <div id="strip-x" role="listbox" aria-label="rank strip"></div>
        <div id="strip-y-wrap" hidden>
          <label>second axis</label>
          <div id="strip-y" role="listbox" aria-label="second rank strip"></div>
        </div>
      </section>
      <section class="middle">
        <div id="tray-wrap">
          <label>suggestions</label>
          <div id="tray"></div>
        </div>
        <div id="board-wrap" hidden>
          <label>place directly</label>
          <div id="board"></div>
        </div>
      </section>
      <nav id="modes">
        <button data-mode="raster-grid" class="on">grid</button>
        <button data-mode="continuous-scale">scale</button>
        <button data-mode="2d-scatter">scatter</button>
        <label id="subsample-wrap">show
          <input id="subsample" type="range" min="0" max="0" step="1" value="0">
          <span id="subsample-label">all</span>
        </label>
      </nav>
      <section class="database south">
        <div id="grid"></div>
        <div id="scale" hidden></div>
        <div id="scatter" hidden></div>
      </section>`;

    this.stripX = new RankStrip(this.q("#strip-x"), {
      onDrop: (id, spot, tie) => this.dropOn("x", id, spot, tie),
      onMove: (id, dir, merge) => this.keyMove("x", id, dir, merge),
      onJump: (id) => this.jumpTo(id),
    });
    this.stripY = new RankStrip(this.q("#strip-y"), {
      onDrop: (id, spot, tie) => this.dropOn("y", id, spot, tie),
      onMove: (id, dir, merge) => this.keyMove("y", id, dir, merge),
      onJump: (id) => this.jumpTo(id),
    });
    this.tray = new SuggestionTray(this.q("#tray"), (id) => this.acceptSuggestion(id));
    this.stripX.adoptSource(this.q("#tray"));
    this.stripY.adoptSource(this.q("#tray"));
    this.grid = new GridView(this.q("#grid"), (id) => this.select(id));
    this.scale = new ScaleView(this.q("#scale"), (id) => this.select(id));
    this.scatter = new ScatterView(this.q("#scatter"),
      (id) => this.select(id),
      (v) => { this.state.viewport = v; });
    this.board = new PlaceBoard(this.q("#board"),
      (id, x, y, clamped) => this.place(id, x, y, clamped));

    this.q("#modes").addEventListener("click", (e) => {
      const b = (e.target as HTMLElement).closest?.("button") as HTMLElement | null;
      if (b && b.dataset.mode) this.setMode(b.dataset.mode as ViewMode);
    });
    const slider = this.q("#subsample") as HTMLInputElement;
    slider.addEventListener("change", () => {
      const v = Number(slider.value);
      this.state.subsample = v >= this.items.size ? 0 : v;
      void this.refetchOrdering();
    });
  }

  private q(sel: string): HTMLElement {
    return this.root.querySelector(sel) as HTMLElement;
  }

  // -------------------------------------------------- session lifecycle

  async boot(session?: string, dims: 1 | 2 = 1): Promise<string> {
    for (const info of await this.client.items()) {
      this.items.set(info.id, info);
    }
    const slider = this.q("#subsample") as HTMLInputElement;
    slider.max = String(this.items.size);
    slider.value = slider.max;

    if (session) {
      const d = await this.client.sessionDetail(session);
      this.state = freshState(d.session_id, d.dims);
      this.state.groups = d.groups;
      this.state.groupsY = d.groups_y;
      this.state.placements = new Map(
        d.placements.map((p) => [p.id, { x: p.x, y: p.y }]));
      if (d.criterion_version > 0) await this.refresh();
    } else {
      const sid = await this.client.createSession(dims);
      this.state = freshState(sid, dims);
    }
    if (!this.state.ordering.length) {
      // nothing ranked yet: the ordering is undefined server-side, but
      // suggestions seed the tray so there is something to drag
      this.state.suggestions = await this.client.suggestions(this.state.session);
    }
    if (this.state.dims === 2) {
      this.q("#strip-y-wrap").hidden = false;
      this.q("#board-wrap").hidden = false;
    }
    this.renderAll();
    return this.state.session;
  }

  private async refresh() {
    const s = this.state;
    [s.ordering, s.suggestions] = await Promise.all([
      this.client.ordering(s.session, s.subsample),
      this.client.suggestions(s.session),
    ]);
  }

  private async refetchOrdering() {
    const s = this.state;
    if (!s.ordering.length) return;
    s.ordering = await this.client.ordering(s.session, s.subsample);
    this.renderViews();
  }

  // ------------------------------------------------------- mutations

  private dropOn(axis: "x" | "y", id: string, spot: DropSpot, tie: boolean) {
    const s = this.state;
    const groups = axis === "x" ? s.groups : s.groupsY;
    const next = applyDrop(groups, id, { at: spot.at, into: spot.into || tie });
    if (next) void this.mutateGroups(axis, next);
  }

  private keyMove(axis: "x" | "y", id: string, dir: -1 | 1, merge: boolean) {
    const s = this.state;
    const groups = axis === "x" ? s.groups : s.groupsY;
    const next = moveItem(groups, id, dir, merge);
    if (next) {
      void this.mutateGroups(axis, next).then(() => {
        (axis === "x" ? this.stripX : this.stripY).focusCard(id);
      });
    }
  }

  private acceptSuggestion(id: string) {
    const next = applyDrop(this.state.groups, id,
      { at: Number.MAX_SAFE_INTEGER, into: false });
    if (next) void this.mutateGroups("x", next);
  }

  async mutateGroups(axis: "x" | "y", next: string[][]): Promise<void> {
    const s = this.state;
    if (s.pending) return;
    if (s.dims === 2 && (axis === "x" ? s.groupsY : s.groups).length === 0) {
      // both strips must have content before the server accepts a 2-dim
      // ranking; hold the local edit and tell the user
      if (axis === "x") s.groups = next; else s.groupsY = next;
      s.notice = "rank on both axes to update the criterion";
      this.renderAll();
      return;
    }
    const prevX = s.groups;
    const prevY = s.groupsY;
    if (axis === "x") s.groups = next; else s.groupsY = next;
    s.pending = true;
    s.notice = "";
    this.renderAll();   // optimistic: strip shows the new order at once
    try {
      await this.client.putRanking(s.session, rankingBody(s));
      await this.refresh();
    } catch (err) {
      s.groups = prevX;
      s.groupsY = prevY;
      s.notice = err instanceof ApiError ? err.message : "request failed";
    } finally {
      s.pending = false;
      this.renderAll();
    }
  }

  private place(id: string, x: number, y: number, clamped: boolean) {
    const s = this.state;
    if (s.pending) return;
    const prev = new Map(s.placements);
    s.placements.set(id, { x, y });
    s.pending = true;
    s.notice = clamped ? "placement clamped to the board edge" : "";
    this.renderAll();
    void (async () => {
      try {
        await this.client.putRanking(s.session, placementsBody(s));
        await this.refresh();
      } catch (err) {
        s.placements = prev;
        s.notice = err instanceof ApiError ? err.message : "request failed";
      } finally {
        s.pending = false;
        this.renderAll();
      }
    })();
  }

  // ------------------------------------------------------- rendering

  private select(id: string) {
    this.board.select(id);
    this.q("#session-label").textContent =
      `session ${this.state.session} · selected ${id}`;
  }

  private setMode(mode: ViewMode) {
    this.state.mode = mode;
    for (const b of this.q("#modes").querySelectorAll("button")) {
      b.classList.toggle("on", b.dataset.mode === mode);
    }
    this.renderViews();
  }

  private jumpTo(id: string) {
    this.setMode("2d-scatter");
    this.scatter.centerOn(id);
    this.state.viewport = { ...this.scatter.viewport };
  }

  renderAll() {
    const s = this.state;
    this.q("#session-label").textContent =
      `session ${s.session}${s.pending ? " · updating" : ""}`;
    this.q("#notice").textContent = s.notice;
    this.stripX.render(s.groups, this.items, s.pending);
    if (s.dims === 2) this.stripY.render(s.groupsY, this.items, s.pending);
    this.tray.render(s.suggestions, this.items, s.pending);
    if (s.dims === 2) this.board.render(s.placements, this.items);
    this.renderViews();
  }

  renderViews() {
    const s = this.state;
    const ranked = rankedIds(s.groups);
    for (const id of rankedIds(s.groupsY)) ranked.add(id);
    this.q("#grid").hidden = s.mode !== "raster-grid";
    this.q("#scale").hidden = s.mode !== "continuous-scale";
    this.q("#scatter").hidden = s.mode !== "2d-scatter";
    const label = this.q("#subsample-label");
    label.textContent = s.subsample > 0 ? String(s.subsample) : "all";
    if (s.mode === "raster-grid") {
      this.grid.render(s.ordering, ranked, this.items);
    } else if (s.mode === "continuous-scale") {
      this.scale.render(s.ordering, ranked, this.items);
    } else {
      this.scatter.render(s.ordering, ranked, s.dims, s.viewport);
    }
  }
}

export { MODES };
