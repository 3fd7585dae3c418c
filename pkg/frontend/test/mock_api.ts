/** In-memory stand-in for the annotation service, speaking the same wire
 * contract through a fetch-compatible function. */

import type { ProposalView, Report, Taxonomy } from "../src/api.js";

export const TAXONOMY: Taxonomy = {
  version: "ui-test-v1",
  descriptors: [
    { id: "first", label: "first flag", category: "movement", hand: "dominant" },
    { id: "second", label: "second flag", category: "orientation", hand: "dominant" },
    { id: "third", label: "third flag", category: "hand_state", hand: "non_dominant" },
    { id: "fourth", label: "fourth flag", category: "other", hand: "none" },
  ],
};

export function defaultProposals(): ProposalView[] {
  return [
    {
      id: "p1",
      referent_id: "next",
      referent_label: "Next track",
      participant_id: "u1",
      media_ref: null,
      annotated: false,
    },
    {
      id: "p2",
      referent_id: "next",
      referent_label: "Next track",
      participant_id: "u2",
      media_ref: "clips/p2.mp4",
      annotated: false,
    },
  ];
}

export function emptyReport(): Report {
  return {
    rows: [],
    summary: {},
    warnings: [],
  };
}

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

export class MockApi {
  store = new Map<string, string[]>();
  report: Report = emptyReport();
  offline = false;
  failNextWith: { status: number; detail: string; offenders?: string[] } | null = null;
  putCount = 0;

  constructor(
    public taxonomy: Taxonomy = TAXONOMY,
    public proposals: ProposalView[] = defaultProposals(),
  ) {}

  vectorFor(proposalId: string): number[] {
    const ids = new Set(this.store.get(proposalId) ?? []);
    return this.taxonomy.descriptors.map((d) => (ids.has(d.id) ? 1 : 0));
  }

  fetch: typeof fetch = async (input, init) => {
    if (this.offline) throw new TypeError("fetch failed");
    const url = new URL(String(input), "http://mock");
    const path = url.pathname;

    if (path === "/api/taxonomy") return jsonResponse(this.taxonomy);

    if (path === "/api/proposals") {
      const referent = url.searchParams.get("referent_id");
      let rows = this.proposals.map((p) => ({
        ...p,
        annotated: p.annotated || this.store.has(p.id),
      }));
      if (referent) rows = rows.filter((p) => p.referent_id === referent);
      return jsonResponse({ proposals: rows });
    }

    const put = path.match(/^\/api\/proposals\/([^/]+)\/annotation$/);
    if (put && init?.method === "PUT") {
      this.putCount += 1;
      if (this.failNextWith) {
        const fail = this.failNextWith;
        this.failNextWith = null;
        return jsonResponse(
          { detail: fail.detail, ...(fail.offenders ? { offenders: fail.offenders } : {}) },
          fail.status,
        );
      }
      const proposalId = decodeURIComponent(put[1] ?? "");
      if (!this.proposals.some((p) => p.id === proposalId)) {
        return jsonResponse({ detail: `unknown proposal: ${proposalId}` }, 404);
      }
      const body = JSON.parse(String(init.body)) as {
        annotator_id: string;
        descriptor_ids: string[];
      };
      const known = new Set(this.taxonomy.descriptors.map((d) => d.id));
      const offenders = [...new Set(body.descriptor_ids.filter((id) => !known.has(id)))].sort();
      if (offenders.length > 0) {
        return jsonResponse(
          { detail: `unknown descriptor ids: ${offenders.join(", ")}`, offenders },
          422,
        );
      }
      const canonical = [...new Set(body.descriptor_ids)].sort();
      this.store.set(proposalId, canonical);
      return jsonResponse({
        proposal_id: proposalId,
        annotator_id: body.annotator_id,
        descriptor_ids: canonical,
        vector: this.vectorFor(proposalId),
        submitted_at: new Date().toISOString(),
      });
    }

    if (path === "/api/report") return jsonResponse(this.report);

    return jsonResponse({ detail: `no route for ${path}` }, 404);
  };
}
