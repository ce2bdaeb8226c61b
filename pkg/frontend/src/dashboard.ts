import { renderDashboard, renderErrorBanner } from "./render.js";
import type { MetricReport } from "./types.js";

/** Evaluation dashboard: renders a stored metric report (from an evaluate
 * run) with Likert bars, binary percentage chips, failure counts, and
 * per-case judge rationale. */
export class Dashboard {
  readonly input: HTMLTextAreaElement;
  readonly output: HTMLElement;
  report: MetricReport | null = null;

  constructor(root: HTMLElement) {
    root.innerHTML = `
<div class="dashboard">
  <label>Report JSON
    <textarea name="report" rows="6" placeholder="Paste the report.json produced by an evaluate run"></textarea>
  </label>
  <button type="button" name="load">Load report</button>
  <div class="report-output"></div>
</div>`;
    this.input = root.querySelector<HTMLTextAreaElement>('textarea[name="report"]')!;
    this.output = root.querySelector<HTMLElement>(".report-output")!;
    root.querySelector<HTMLButtonElement>('button[name="load"]')!.addEventListener(
      "click",
      () => this.loadFromInput(),
    );
    this.render();
  }

  loadFromInput(): void {
    const text = this.input.value.trim();
    if (!text) {
      this.report = null;
      this.render();
      return;
    }
    try {
      this.setReport(JSON.parse(text) as MetricReport);
    } catch (error) {
      this.output.innerHTML = renderErrorBanner("bad_report_json", String(error));
    }
  }

  setReport(report: MetricReport): void {
    this.report = report;
    this.render();
  }

  render(): void {
    this.output.innerHTML = renderDashboard(this.report);
  }
}
