/** Entry point: wires the tab bar and mounts both views against the live API. */

import { ApiClient } from "./api.js";
import { HumevalWizard } from "./humeval.js";
import { SearchView } from "./search.js";

function activate(name: string): void {
  for (const panel of document.querySelectorAll<HTMLElement>(".panel")) {
    panel.classList.toggle("active", panel.id === name);
  }
  for (const button of document.querySelectorAll<HTMLButtonElement>("nav button")) {
    button.classList.toggle("active", button.dataset.panel === name);
  }
}

document.addEventListener("DOMContentLoaded", () => {
  const api = new ApiClient("");
  new SearchView(document.getElementById("search-view")!, api);
  new HumevalWizard(document.getElementById("humeval-view")!, api);
  for (const button of document.querySelectorAll<HTMLButtonElement>("nav button")) {
    button.addEventListener("click", () => activate(button.dataset.panel!));
  }
});
