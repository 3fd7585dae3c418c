/** Progress dashboard: per-referent completion plus the live report.
 * Every metric shown here comes from the service; the client never
 * computes agreement values itself. */

import { ApiClient, Report } from "./api.js";
import { el } from "./dom.js";
import { progressByReferent } from "./state.js";

export class DashboardScreen {
  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient,
    private readonly annotatorId: string,
  ) {}

  async refresh(): Promise<void> {
    this.root.replaceChildren(
      el("section", { class: "panel" }, [el("p", {}, ["loading..."])]),
    );
    let rows;
    let report: Report;
    try {
      [rows, report] = await Promise.all([
        this.api.proposals({ annotatorId: this.annotatorId }),
        this.api.report(),
      ]);
    } catch {
      this.root.replaceChildren(
        el("section", { class: "panel error-state" }, [
          el("p", {}, ["Could not load progress from the annotation service."]),
          this.retryButton(),
        ]),
      );
      return;
    }

    const softByReferent = new Map<string, number | null>();
    for (const row of report.rows) {
      softByReferent.set(row.referent, row.sar);
    }

    const table = el("table", { class: "progress" }, [
      el("thead", {}, [
        el("tr", {}, [
          el("th", {}, ["Referent"]),
          el("th", {}, ["Annotated"]),
          el("th", {}, ["Soft rate"]),
        ]),
      ]),
    ]);
    const body = el("tbody");
    for (const entry of progressByReferent(rows)) {
      const complete = entry.annotated === entry.total;
      const progressCell = el("td", {}, [`${entry.annotated} / ${entry.total}`]);
      if (complete) {
        progressCell.appendChild(el("span", { class: "badge" }, ["complete"]));
      }
      const soft = softByReferent.get(entry.referentLabel);
      body.appendChild(
        el("tr", { "data-referent-id": entry.referentId }, [
          el("td", {}, [entry.referentLabel]),
          progressCell,
          el("td", { class: "soft-rate" }, [
            soft === null || soft === undefined ? "pending" : soft.toFixed(3),
          ]),
        ]),
      );
    }
    table.appendChild(body);

    const children: HTMLElement[] = [el("h2", {}, ["Progress"]), table];
    if (report.warnings.length > 0) {
      const notices = el("ul", { class: "notices" });
      for (const warning of report.warnings) {
        notices.appendChild(el("li", {}, [warning]));
      }
      children.push(el("h3", {}, ["Report notices"]), notices);
    }
    this.root.replaceChildren(el("section", { class: "panel dashboard" }, children));
  }

  private retryButton(): HTMLElement {
    const button = el("button", { class: "retry-btn", type: "button" }, ["Retry"]);
    button.addEventListener("click", () => void this.refresh());
    return button;
  }
}
