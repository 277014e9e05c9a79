import { ApiClient } from "./api.js";
import { createApp } from "./app.js";

const base =
  document.querySelector('meta[name="api-base"]')?.getAttribute("content") ?? "";
const root = document.getElementById("app");
if (root === null) throw new Error("missing #app element");
void createApp(root, new ApiClient(base)).start();
