import { App } from "./app.js";
import { SearchClient } from "./api.js";

const SERVICE_URL =
  new URLSearchParams(window.location.search).get("service") ??
  "http://127.0.0.1:8080";

const root = document.getElementById("app");
if (root) {
  void new App(root, new SearchClient(SERVICE_URL), window).start();
}
