/** Bootstrap: wire the form controls to the controller. */

import { App } from "./app.js";
import type { UserGroup, UserLocation } from "./types.js";

function start(): void {
  const root = document.getElementById("app");
  if (!root) return;
  const app = new App(root, { storage: window.sessionStorage });

  const form = document.getElementById("search-form") as HTMLFormElement | null;
  const input = document.getElementById("search-input") as HTMLInputElement | null;
  const location = document.getElementById("context-location") as HTMLSelectElement | null;
  const group = document.getElementById("context-group") as HTMLSelectElement | null;

  const syncContext = () => {
    app.setContext(
      (location?.value ?? "home") as UserLocation,
      (group?.value ?? "anonymous") as UserGroup,
    );
  };
  syncContext();

  form?.addEventListener("submit", (event) => {
    event.preventDefault();
    if (input?.value) void app.submitQuery(input.value);
  });
  location?.addEventListener("change", () => {
    syncContext();
    if (app.state.query) void app.submitQuery(app.state.query);
  });
  group?.addEventListener("change", () => {
    syncContext();
    if (app.state.query) void app.submitQuery(app.state.query);
  });
}

document.addEventListener("DOMContentLoaded", start);
