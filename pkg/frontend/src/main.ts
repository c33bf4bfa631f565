import { liveApi } from "./api.js";
import { createApp } from "./app.js";

const root = document.getElementById("app");
if (root) {
  createApp(root, liveApi);
}
