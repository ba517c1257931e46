// Browser entry point. Query parameters pick the service and dataset;
// the session id rides in the hash so a reload resumes the same session
// from server state.
//
//   index.html?api=http://127.0.0.1:8000&dataset=demo.json&dims=2#s=abcd

import { Client } from "./api.js";
import { App } from "./app.js";

async function start() {
  const params = new URLSearchParams(window.location.search);
  const api = params.get("api") || "";
  const dataset = params.get("dataset") || "";
  const dims = params.get("dims") === "2" ? 2 : 1;
  const resumed = (window.location.hash.match(/^#s=([0-9a-f]+)$/) || [])[1];

  const root = document.getElementById("app")!;
  const app = new App(root, new Client(api, dataset));
  try {
    const sid = await app.boot(resumed, dims);
    window.location.hash = `s=${sid}`;
  } catch (err) {
    root.innerHTML = `<p class="boot-error">could not reach the session service: ${
      err instanceof Error ? err.message : String(err)}</p>`;
  }
}

void start();
