import { EditorApp } from "./app.js";

const root = document.getElementById("app");
if (!root) throw new Error("missing #app mount point");

new EditorApp(root).start().catch((err) => {
  root.textContent = `failed to load catalog from the engine: ${String(err)}`;
});
