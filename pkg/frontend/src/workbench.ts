import { ApiClient, ApiError } from "./api.js";
import { renderErrorBanner, renderSummaryPanels } from "./render.js";
import type { SummarizeResponse } from "./types.js";

/** Case workbench: paste a case, get the six-part summary back. */
export class Workbench {
  readonly complaintInput: HTMLTextAreaElement;
  readonly statementInput: HTMLTextAreaElement;
  readonly strategySelect: HTMLSelectElement;
  readonly submitButton: HTMLButtonElement;
  readonly output: HTMLElement;
  lastResponse: SummarizeResponse | null = null;
  onSummary: ((response: SummarizeResponse) => void) | null = null;

  constructor(
    root: HTMLElement,
    private readonly api: ApiClient,
  ) {
    root.innerHTML = `
<div class="workbench">
  <form class="case-form">
    <label>Complaint
      <textarea name="complaint" rows="8" placeholder="Paste the complaint text"></textarea>
    </label>
    <label>Written statement (optional)
      <textarea name="statement" rows="5" placeholder="Paste the opposite party's written statement"></textarea>
    </label>
    <label>Strategy
      <select name="strategy">
        <option value="partwise-cot" selected>Part-wise, chain of thought</option>
        <option value="partwise-sr">Part-wise, plain</option>
        <option value="single-prompt">Single prompt</option>
      </select>
    </label>
    <button type="submit" disabled>Summarize</button>
  </form>
  <div class="summary-output"></div>
</div>`;
    this.complaintInput = root.querySelector<HTMLTextAreaElement>('textarea[name="complaint"]')!;
    this.statementInput = root.querySelector<HTMLTextAreaElement>('textarea[name="statement"]')!;
    this.strategySelect = root.querySelector<HTMLSelectElement>('select[name="strategy"]')!;
    this.submitButton = root.querySelector<HTMLButtonElement>("button[type=submit]")!;
    this.output = root.querySelector<HTMLElement>(".summary-output")!;

    this.complaintInput.addEventListener("input", () => this.syncSubmitState());
    root.querySelector("form")!.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.submit();
    });
  }

  syncSubmitState(): void {
    this.submitButton.disabled = this.complaintInput.value.trim() === "";
  }

  async submit(): Promise<void> {
    const complaint = this.complaintInput.value.trim();
    if (!complaint) return;
    this.submitButton.disabled = true;
    this.output.innerHTML = `<p class="busy">Summarizing&hellip;</p>`;
    try {
      const response = await this.api.summarize({
        complaint_text: complaint,
        written_statement_text: this.statementInput.value.trim(),
        strategy: this.strategySelect.value,
      });
      this.lastResponse = response;
      this.output.innerHTML = renderSummaryPanels(
        response.summary,
        response.provenance.warnings,
      );
      this.onSummary?.(response);
    } catch (error) {
      if (error instanceof ApiError) {
        this.output.innerHTML = renderErrorBanner(error.code, error.message);
      } else {
        this.output.innerHTML = renderErrorBanner("network_error", String(error));
      }
    } finally {
      this.syncSubmitState();
    }
  }
}
