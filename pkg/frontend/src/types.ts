// Mirrors of the /v1 JSON schemas. The UI renders these verbatim and never
// recomputes scores client-side.

export interface Sector {
  name: string;
  code: number;
}

export interface EvidenceItem {
  label: string;
  description: string;
}

export interface SummaryRecord {
  schema_version?: number;
  case_id?: string;
  overview: string;
  sector: Sector;
  issues: string[];
  evidence_complainant: EvidenceItem[];
  evidence_opposite: EvidenceItem[];
  reliefs: string[];
}

export interface PartTrace {
  part: string;
  attempts: number;
  prompt_sha256: string;
}

export interface SummarizeResponse {
  case_id: string;
  summary: SummaryRecord;
  provenance: {
    strategy: string;
    model_name: string;
    parts: PartTrace[];
    warnings: string[];
  };
}

export interface SummarizeRequest {
  case_id?: string;
  complaint_text?: string;
  written_statement_text?: string;
  strategy?: string;
}

export interface RankedRow {
  judgment_id: string;
  rank: number;
  lexical_score: number;
  semantic_score: number;
  fused_score: number;
  title: string;
}

export interface SimilarRequest {
  overview?: string;
  case_id?: string;
  sector?: number;
  k?: number;
  weight?: number;
}

export interface SimilarResponse {
  query: { sector: Sector | null; k: number; weight: number };
  warning: string | null;
  results: RankedRow[];
}

export interface JudgmentRecord {
  id: string;
  title: string;
  citation: string;
  sector_name: string;
  sector_code: number;
  brief: string;
  full_text?: string;
}

export interface MetricReport {
  n: number;
  kinds: string[];
  means: Record<string, number>;
  scored: Record<string, number>;
  failures: Record<string, number>;
  matrix: Record<string, Record<string, number>>;
  rationales: Record<string, Record<string, string>>;
  reference_means: Record<string, Record<string, number>>;
}

export interface ApiErrorBody {
  error: { code: string; message: string };
}
