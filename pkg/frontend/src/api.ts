// Thin client for the criteria session service. All state lives on the
// server; this module only shapes requests and decodes responses.

export interface OrderingRow {
  id: string;
  f: number[];
  rank: number[];
}

export interface Suggestion {
  id: string;
  gain: number;
}

export interface ItemInfo {
  id: string;
  display: string | null;
  tags: string[];
}

export interface RankingBody {
  groups?: string[][];
  groups_y?: string[][];
  placements?: { id: string; x: number; y: number }[];
}

export interface SessionDetail {
  session_id: string;
  dataset: string;
  dims: 1 | 2;
  criterion_version: number;
  groups: string[][];
  groups_y: string[][];
  placements: { id: string; x: number; y: number }[];
}

export class ApiError extends Error {
  status: number;
  constructor(status: number, message: string) {
    super(message);
    this.status = status;
  }
}

async function decode(res: Response): Promise<any> {
  let body: any = null;
  try {
    body = await res.json();
  } catch {
    // non-JSON error body; fall through with the status line
  }
  if (!res.ok) {
    const msg = body && (body.error || body.detail) || `HTTP ${res.status}`;
    throw new ApiError(res.status, String(msg));
  }
  return body;
}

export class Client {
  base: string;
  dataset: string;

  constructor(base = "", dataset = "") {
    this.base = base.replace(/\/$/, "");
    this.dataset = dataset;
  }

  private url(path: string, params?: Record<string, string>): string {
    const q = params
      ? Object.entries(params).filter(([, v]) => v !== "")
      : [];
    const qs = q.length
      ? "?" + q.map(([k, v]) => `${k}=${encodeURIComponent(v)}`).join("&")
      : "";
    return this.base + path + qs;
  }

  async createSession(dims: 1 | 2): Promise<string> {
    const res = await fetch(this.url("/sessions"), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ dataset: this.dataset, dims }),
    });
    return (await decode(res)).session_id as string;
  }

  async sessionDetail(session: string): Promise<SessionDetail> {
    const res = await fetch(this.url(`/sessions/${session}`));
    return decode(res);
  }

  async putRanking(session: string, body: RankingBody): Promise<number> {
    const res = await fetch(this.url(`/sessions/${session}/ranking`), {
      method: "PUT",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    return (await decode(res)).criterion_version as number;
  }

  async ordering(session: string, subsample = 0): Promise<OrderingRow[]> {
    const res = await fetch(this.url(`/sessions/${session}/ordering`,
      subsample > 0 ? { subsample: String(subsample) } : undefined));
    return decode(res);
  }

  async suggestions(session: string, n = 0): Promise<Suggestion[]> {
    const res = await fetch(this.url(`/sessions/${session}/suggestions`,
      n > 0 ? { n: String(n) } : undefined));
    return decode(res);
  }

  async items(ids?: string[]): Promise<ItemInfo[]> {
    const params: Record<string, string> = { dataset: this.dataset };
    if (ids && ids.length) params.ids = ids.join(",");
    const res = await fetch(this.url("/items", params));
    return decode(res);
  }
}
