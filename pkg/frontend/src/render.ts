import type {
  EvidenceItem,
  JudgmentRecord,
  MetricReport,
  RankedRow,
  Sector,
  SimilarResponse,
  SummaryRecord,
} from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

export function sectorBadge(sector: Sector): string {
  return `<span class="sector-badge">${escapeHtml(sector.name)} &middot; ${sector.code}</span>`;
}

function evidenceRows(items: EvidenceItem[]): string {
  if (items.length === 0) {
    return `<tr><td class="nil" colspan="2">Nil</td></tr>`;
  }
  return items
    .map(
      (item) =>
        `<tr><td class="evidence-label">${escapeHtml(item.label)}</td>` +
        `<td>${escapeHtml(item.description)}</td></tr>`,
    )
    .join("");
}

/** The six labeled panels of a material summary. */
export function renderSummaryPanels(summary: SummaryRecord, warnings: string[] = []): string {
  const warningHtml = warnings.length
    ? `<div class="inline-warnings">${warnings
        .map((w) => `<p class="warning">${escapeHtml(w)}</p>`)
        .join("")}</div>`
    : "";
  return `
${warningHtml}
<section class="panel" data-part="overview">
  <h3>Overview</h3>
  <p>${escapeHtml(summary.overview)}</p>
</section>
<section class="panel" data-part="sector">
  <h3>Sector</h3>
  ${sectorBadge(summary.sector)}
</section>
<section class="panel" data-part="issues">
  <h3>Issues</h3>
  <ol>${summary.issues.map((issue) => `<li>${escapeHtml(issue)}</li>`).join("")}</ol>
</section>
<section class="panel" data-part="evidence_complainant">
  <h3>Evidence &ndash; Complainant</h3>
  <table class="evidence">${evidenceRows(summary.evidence_complainant)}</table>
</section>
<section class="panel" data-part="evidence_opposite">
  <h3>Evidence &ndash; Opposite Party</h3>
  <table class="evidence">${evidenceRows(summary.evidence_opposite)}</table>
</section>
<section class="panel" data-part="reliefs">
  <h3>Reliefs Sought</h3>
  <ol>${summary.reliefs.map((relief) => `<li>${escapeHtml(relief)}</li>`).join("")}</ol>
</section>`;
}

export function renderErrorBanner(code: string, message: string): string {
  return (
    `<div class="error-banner" role="alert">` +
    `<code class="error-code">${escapeHtml(code)}</code> ` +
    `<span class="error-message">${escapeHtml(message)}</span></div>`
  );
}

function score(value: number): string {
  return value.toFixed(4);
}

export function renderPrecedentRows(rows: RankedRow[]): string {
  return rows
    .map(
      (row) =>
        `<tr class="precedent-row" data-judgment-id="${escapeHtml(row.judgment_id)}">` +
        `<td class="rank">${row.rank}</td>` +
        `<td class="title">${escapeHtml(row.title || row.judgment_id)}</td>` +
        `<td class="num">${score(row.lexical_score)}</td>` +
        `<td class="num">${score(row.semantic_score)}</td>` +
        `<td class="num">${score(row.fused_score)}</td></tr>`,
    )
    .join("");
}

export function renderPrecedentTable(response: SimilarResponse): string {
  if (response.results.length === 0) {
    const sector = response.query.sector;
    const where = sector ? `sector ${escapeHtml(sector.name)} (${sector.code})` : "the corpus";
    return `<p class="empty-notice">No precedents found in ${where}. Try another sector or widen the search.</p>`;
  }
  const warning = response.warning
    ? `<p class="warning">${escapeHtml(response.warning)}</p>`
    : "";
  return `${warning}
<table class="precedents">
  <thead><tr><th>#</th><th>Judgment</th><th>Lexical</th><th>Semantic</th><th>Fused</th></tr></thead>
  <tbody>${renderPrecedentRows(response.results)}</tbody>
</table>`;
}

export function renderJudgmentDetail(judgment: JudgmentRecord): string {
  return `
<article class="judgment-detail">
  <h3>${escapeHtml(judgment.title)}</h3>
  <p class="citation">${escapeHtml(judgment.citation)}</p>
  <p>${sectorBadge({ name: judgment.sector_name, code: judgment.sector_code })}</p>
  <p class="brief">${escapeHtml(judgment.brief)}</p>
</article>`;
}

const LIKERT_KINDS = ["OverviewAccuracy", "Oversimplification", "OverviewRetrieval", "IssuesAccuracy"];
const BINARY_KINDS = ["EvidenceAccuracy", "IssueFormatting", "SectorRelevance", "ReliefAccuracy"];

function metricCell(report: MetricReport, kind: string, likert: boolean): string {
  const mean = report.means[kind];
  const failures = report.failures[kind] ?? 0;
  const failureNote = `<span class="failures">${failures} failed</span>`;
  if (mean === undefined) {
    return `<div class="metric" data-kind="${kind}"><h4>${kind}</h4><p class="nil">not scored</p>${failureNote}</div>`;
  }
  if (likert) {
    const width = ((mean / 5) * 100).toFixed(1);
    return (
      `<div class="metric" data-kind="${kind}"><h4>${kind}</h4>` +
      `<div class="bar-track"><div class="bar" style="width:${width}%"></div></div>` +
      `<span class="mean">${mean.toFixed(2)} / 5</span>${failureNote}</div>`
    );
  }
  const percent = (mean * 100).toFixed(0);
  return (
    `<div class="metric" data-kind="${kind}"><h4>${kind}</h4>` +
    `<span class="chip">${percent}%</span>${failureNote}</div>`
  );
}

function rationaleDrilldown(report: MetricReport): string {
  const cases = Object.keys(report.rationales ?? {}).sort();
  const blocks = cases
    .filter((caseId) => Object.keys(report.rationales[caseId] ?? {}).length > 0)
    .map((caseId) => {
      const rows = Object.entries(report.rationales[caseId] ?? {})
        .map(
          ([kind, text]) =>
            `<dt>${escapeHtml(kind)} = ${report.matrix[caseId]?.[kind] ?? "?"}</dt>` +
            `<dd>${escapeHtml(text)}</dd>`,
        )
        .join("");
      return `<details class="case-drilldown" data-case="${escapeHtml(caseId)}"><summary>${escapeHtml(caseId)}</summary><dl>${rows}</dl></details>`;
    });
  return blocks.join("");
}

/** Eight-metric report: Likert means as bars on a 1-5 track, binary means as
 * percentage chips, with per-case judge rationale underneath. */
export function renderDashboard(report: MetricReport | null): string {
  if (report === null) {
    return `<p class="empty-notice">No evaluation report loaded yet. Paste a report JSON produced by the evaluate run.</p>`;
  }
  const likert = LIKERT_KINDS.map((kind) => metricCell(report, kind, true)).join("");
  const binary = BINARY_KINDS.map((kind) => metricCell(report, kind, false)).join("");
  return `
<p class="report-meta">${report.n} summary pairs evaluated</p>
<div class="metric-grid likert">${likert}</div>
<div class="metric-grid binary">${binary}</div>
<h3>Per-case rationale</h3>
${rationaleDrilldown(report)}`;
}
