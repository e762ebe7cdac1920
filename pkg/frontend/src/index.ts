import { ApiClient } from "./api.js";
import { buildApp } from "./app.js";

const base = window.location.origin;
const mount = document.getElementById("app");
if (!mount) {
	throw new Error("missing #app mount point");
}
const app = buildApp(document, new ApiClient(base), mount);

// resume a session carried in the URL fragment
if (window.location.hash.length > 1) {
	void app.actions.reloadSession();
}

// expose for console poking
(window as any).explorer = app;
