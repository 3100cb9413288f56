/**
 * Boot: point the client at the service and mount the app. The service base
 * URL can be overridden with ?service=… (it must include /api/v1).
 */

import { ApiClient } from "./api.js";
import { mountApp } from "./dom.js";

const params = new URLSearchParams(window.location.search);
const base = params.get("service") ?? "http://127.0.0.1:8000/api/v1";
const root = document.getElementById("app");
if (root === null) {
  throw new Error("missing #app element");
}
void mountApp(root, new ApiClient(base)).catch((error: unknown) => {
  root.replaceChildren(
    document.createTextNode(`cannot reach the service at ${base}: ${String(error)}`),
  );
});
