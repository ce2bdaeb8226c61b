import { ApiClient } from "./api.js";
import { Dashboard } from "./dashboard.js";
import { PrecedentExplorer } from "./explorer.js";
import { Workbench } from "./workbench.js";

function activateTabs(): void {
  const buttons = document.querySelectorAll<HTMLButtonElement>(".tab-bar button");
  const views = document.querySelectorAll<HTMLElement>(".view");
  buttons.forEach((button) => {
    button.addEventListener("click", () => {
      buttons.forEach((b) => b.classList.toggle("active", b === button));
      views.forEach((view) =>
        view.classList.toggle("active", view.id === button.dataset.view),
      );
    });
  });
}

function boot(): void {
  const api = new ApiClient("");
  const workbench = new Workbench(document.getElementById("workbench")!, api);
  const explorer = new PrecedentExplorer(document.getElementById("explorer")!, api);
  new Dashboard(document.getElementById("dashboard")!);
  void explorer.loadSectors();
  // a fresh summary immediately feeds the precedent explorer
  workbench.onSummary = (response) => explorer.setCase(response.case_id);
  activateTabs();
}

document.addEventListener("DOMContentLoaded", boot);
