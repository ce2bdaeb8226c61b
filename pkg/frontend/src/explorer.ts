import { ApiClient, ApiError } from "./api.js";
import { renderErrorBanner, renderJudgmentDetail, renderPrecedentTable } from "./render.js";
import { debounce, LatestWins } from "./seq.js";
import type { Sector, SimilarResponse } from "./types.js";

export interface ExplorerQuery {
  caseId?: string;
  overview?: string;
  sectorCode: number | null;
  weight: number;
  k: number;
}

/** Precedent explorer: ranked similar judgments with live retrieval controls.
 *
 * Every control mutation issues exactly one (debounced) search request, and
 * responses arriving out of order are discarded by sequence number, so the
 * table always reflects the newest control state.
 */
export class PrecedentExplorer {
  readonly sectorSelect: HTMLSelectElement;
  readonly weightSlider: HTMLInputElement;
  readonly weightValue: HTMLElement;
  readonly kSelect: HTMLSelectElement;
  readonly table: HTMLElement;
  readonly detail: HTMLElement;
  lastResponse: SimilarResponse | null = null;
  requestCount = 0;

  private readonly seq = new LatestWins();
  private readonly scheduleQuery: () => void;
  private caseId: string | null = null;
  private overview: string | null = null;

  constructor(
    root: HTMLElement,
    private readonly api: ApiClient,
    debounceMs = 150,
  ) {
    root.innerHTML = `
<div class="explorer">
  <div class="controls">
    <label>Sector
      <select name="sector"><option value="">from summary</option></select>
    </label>
    <label>Lexical weight <span class="weight-value">0.50</span>
      <input type="range" name="weight" min="0" max="1" step="0.05" value="0.5" />
    </label>
    <label>Results
      <select name="k">
        <option>3</option>
        <option selected>5</option>
        <option>10</option>
      </select>
    </label>
  </div>
  <div class="precedent-table"></div>
  <div class="judgment-pane"></div>
</div>`;
    this.sectorSelect = root.querySelector<HTMLSelectElement>('select[name="sector"]')!;
    this.weightSlider = root.querySelector<HTMLInputElement>('input[name="weight"]')!;
    this.weightValue = root.querySelector<HTMLElement>(".weight-value")!;
    this.kSelect = root.querySelector<HTMLSelectElement>('select[name="k"]')!;
    this.table = root.querySelector<HTMLElement>(".precedent-table")!;
    this.detail = root.querySelector<HTMLElement>(".judgment-pane")!;

    this.scheduleQuery = debounce(() => void this.runQuery(), debounceMs);
    this.sectorSelect.addEventListener("change", () => this.scheduleQuery());
    this.kSelect.addEventListener("change", () => this.scheduleQuery());
    this.weightSlider.addEventListener("input", () => {
      this.weightValue.textContent = Number(this.weightSlider.value).toFixed(2);
      this.scheduleQuery();
    });
    this.table.addEventListener("click", (event) => {
      const row = (event.target as HTMLElement).closest<HTMLElement>(".precedent-row");
      if (row?.dataset.judgmentId) void this.openJudgment(row.dataset.judgmentId);
    });
  }

  async loadSectors(): Promise<void> {
    const sectors: Sector[] = await this.api.getSectors();
    for (const sector of sectors) {
      const option = document.createElement("option");
      option.value = String(sector.code);
      option.textContent = `${sector.name} (${sector.code})`;
      this.sectorSelect.appendChild(option);
    }
  }

  /** Point the explorer at a summarized case; kicks off the first query. */
  setCase(caseId: string): void {
    this.caseId = caseId;
    this.overview = null;
    this.scheduleQuery();
  }

  setOverview(overview: string, sectorCode: number): void {
    this.overview = overview;
    this.caseId = null;
    this.sectorSelect.value = String(sectorCode);
    this.scheduleQuery();
  }

  currentQuery(): ExplorerQuery {
    return {
      caseId: this.caseId ?? undefined,
      overview: this.overview ?? undefined,
      sectorCode: this.sectorSelect.value === "" ? null : Number(this.sectorSelect.value),
      weight: Number(this.weightSlider.value),
      k: Number(this.kSelect.value),
    };
  }

  async runQuery(): Promise<void> {
    const query = this.currentQuery();
    if (!query.caseId && !query.overview) return;
    const token = this.seq.issue();
    this.requestCount += 1;
    try {
      const response = await this.api.similar({
        case_id: query.caseId,
        overview: query.overview,
        sector: query.sectorCode ?? undefined,
        weight: query.weight,
        k: query.k,
      });
      if (!this.seq.isCurrent(token)) return; // stale response: discard
      this.lastResponse = response;
      this.table.innerHTML = renderPrecedentTable(response);
    } catch (error) {
      if (!this.seq.isCurrent(token)) return;
      const banner =
        error instanceof ApiError
          ? renderErrorBanner(error.code, error.message)
          : renderErrorBanner("network_error", String(error));
      this.table.innerHTML = banner;
    }
  }

  async openJudgment(id: string): Promise<void> {
    try {
      const judgment = await this.api.getJudgment(id);
      this.detail.innerHTML = renderJudgmentDetail(judgment);
    } catch (error) {
      const banner =
        error instanceof ApiError
          ? renderErrorBanner(error.code, error.message)
          : renderErrorBanner("network_error", String(error));
      this.detail.innerHTML = banner;
    }
  }
}
