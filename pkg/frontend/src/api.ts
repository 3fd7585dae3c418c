/** Typed client for the annotation service. All network access goes
 * through this module; nothing else in the app touches fetch. */

export interface Descriptor {
  id: string;
  label: string;
  category: string;
  hand: string;
}

export interface Taxonomy {
  version: string;
  descriptors: Descriptor[];
  notes?: string | null;
}

export interface ProposalView {
  id: string;
  referent_id: string;
  referent_label: string;
  participant_id: string;
  media_ref: string | null;
  annotated: boolean;
}

export interface AnnotationAck {
  proposal_id: string;
  annotator_id: string;
  descriptor_ids: string[];
  vector: number[];
  submitted_at: string;
}

export interface ReportRow {
  referent: string;
  ar: number | null;
  eta_ar: number | null;
  sar: number | null;
  eta_sar: number | null;
}

export interface ColumnStats {
  mean: number | null;
  std: number | null;
}

export interface Report {
  rows: ReportRow[];
  summary: Record<string, ColumnStats>;
  warnings: string[];
}

/** Non-2xx response, with the body's detail message and, for descriptor
 * validation failures, the offending ids. */
export class ApiError extends Error {
  readonly status: number;
  readonly offenders: string[];

  constructor(message: string, status: number, offenders: string[] = []) {
    super(message);
    this.name = "ApiError";
    this.status = status;
    this.offenders = offenders;
  }
}

async function errorFrom(response: Response): Promise<ApiError> {
  let detail = `request failed with status ${response.status}`;
  let offenders: string[] = [];
  try {
    const body: unknown = await response.json();
    if (body && typeof body === "object") {
      const record = body as Record<string, unknown>;
      if (typeof record.detail === "string") detail = record.detail;
      if (Array.isArray(record.offenders)) {
        offenders = record.offenders.filter(
          (x): x is string => typeof x === "string",
        );
      }
    }
  } catch {
    // non-JSON error body; keep the generic message
  }
  return new ApiError(detail, response.status, offenders);
}

export class ApiClient {
  private readonly base: string;
  private readonly fetchFn: typeof fetch;

  constructor(base = "/api", fetchFn?: typeof fetch) {
    this.base = base.replace(/\/$/, "");
    // bind lazily so tests can swap globalThis.fetch after construction
    this.fetchFn = fetchFn ?? ((...args) => globalThis.fetch(...args));
  }

  private async get(path: string): Promise<unknown> {
    const response = await this.fetchFn(this.base + path);
    if (!response.ok) throw await errorFrom(response);
    return response.json();
  }

  async taxonomy(): Promise<Taxonomy> {
    return (await this.get("/taxonomy")) as Taxonomy;
  }

  async proposals(filter?: {
    referentId?: string;
    annotatorId?: string;
  }): Promise<ProposalView[]> {
    const query = new URLSearchParams();
    if (filter?.referentId) query.set("referent_id", filter.referentId);
    if (filter?.annotatorId) query.set("annotator_id", filter.annotatorId);
    const suffix = query.toString() ? `?${query}` : "";
    const body = (await this.get(`/proposals${suffix}`)) as {
      proposals: ProposalView[];
    };
    return body.proposals;
  }

  async submitAnnotation(
    proposalId: string,
    annotatorId: string,
    descriptorIds: string[],
  ): Promise<AnnotationAck> {
    const response = await this.fetchFn(
      `${this.base}/proposals/${encodeURIComponent(proposalId)}/annotation`,
      {
        method: "PUT",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({
          annotator_id: annotatorId,
          descriptor_ids: descriptorIds,
        }),
      },
    );
    if (!response.ok) throw await errorFrom(response);
    return (await response.json()) as AnnotationAck;
  }

  async report(annotator?: string): Promise<Report> {
    const suffix = annotator
      ? `?${new URLSearchParams({ annotator })}`
      : "";
    return (await this.get(`/report${suffix}`)) as Report;
  }
}

/** API mount point baked into the page at build time, "/api" by default. */
export function apiBaseFromDocument(doc: Document): string {
  const content = doc
    .querySelector('meta[name="api-base"]')
    ?.getAttribute("content")
    ?.trim();
  return content || "/api";
}
