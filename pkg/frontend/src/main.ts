/** Boot: identify the annotator, load the study, wire the two screens. */

import { ApiClient, apiBaseFromDocument } from "./api.js";
import { AnnotateScreen } from "./annotate.js";
import { DashboardScreen } from "./dashboard.js";
import { el } from "./dom.js";
import { loadAnnotatorId, saveAnnotatorId } from "./storage.js";

type Tab = "annotate" | "dashboard";

function identifyScreen(root: HTMLElement, onDone: (id: string) => void): void {
  const input = el("input", {
    type: "text",
    placeholder: "your annotator id",
    "aria-label": "annotator id",
  }) as HTMLInputElement;
  const form = el("form", { class: "identify" }, [
    el("label", {}, ["Who is annotating?"]),
    input,
    el("button", { type: "submit" }, ["Start"]),
  ]) as HTMLFormElement;
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const id = input.value.trim();
    if (!id) return;
    saveAnnotatorId(id);
    onDone(id);
  });
  root.replaceChildren(el("section", { class: "panel" }, [form]));
}

function errorScreen(root: HTMLElement, retry: () => void): void {
  const button = el("button", { class: "retry-btn", type: "button" }, ["Retry"]);
  button.addEventListener("click", retry);
  root.replaceChildren(
    el("section", { class: "panel error-state" }, [
      el("p", {}, ["Could not reach the annotation service."]),
      button,
    ]),
  );
}

async function studyScreens(root: HTMLElement, api: ApiClient, annotatorId: string): Promise<void> {
  let taxonomy;
  let proposals;
  try {
    [taxonomy, proposals] = await Promise.all([
      api.taxonomy(),
      api.proposals({ annotatorId }),
    ]);
  } catch {
    errorScreen(root, () => void studyScreens(root, api, annotatorId));
    return;
  }

  const annotateRoot = el("div");
  const dashboardRoot = el("div");
  const annotate = new AnnotateScreen(annotateRoot, taxonomy, {
    api,
    annotatorId,
  });
  const dashboard = new DashboardScreen(dashboardRoot, api, annotatorId);

  const tabs: Record<Tab, HTMLButtonElement> = {
    annotate: el("button", { type: "button" }, ["Annotate"]) as HTMLButtonElement,
    dashboard: el("button", { type: "button" }, ["Progress"]) as HTMLButtonElement,
  };
  const body = el("div");
  let active: Tab = "annotate";

  function show(tab: Tab): void {
    if (tab === active) return;
    if (
      tab === "dashboard" &&
      annotate.hasUnsavedChanges() &&
      !window.confirm("You have unsaved changes. Leave this proposal anyway?")
    ) {
      return;
    }
    active = tab;
    tabs.annotate.setAttribute("aria-current", String(tab === "annotate"));
    tabs.dashboard.setAttribute("aria-current", String(tab === "dashboard"));
    body.replaceChildren(tab === "annotate" ? annotateRoot : dashboardRoot);
    if (tab === "dashboard") void dashboard.refresh();
  }

  tabs.annotate.addEventListener("click", () => show("annotate"));
  tabs.dashboard.addEventListener("click", () => show("dashboard"));
  tabs.annotate.setAttribute("aria-current", "true");
  tabs.dashboard.setAttribute("aria-current", "false");

  window.addEventListener("beforeunload", (event) => {
    if (annotate.hasUnsavedChanges()) event.preventDefault();
  });

  annotate.start(proposals);
  body.replaceChildren(annotateRoot);
  root.replaceChildren(
    el("nav", { class: "tabs" }, [tabs.annotate, tabs.dashboard]),
    body,
  );
}

export function boot(root: HTMLElement): void {
  const api = new ApiClient(apiBaseFromDocument(document));
  const existing = loadAnnotatorId();
  if (existing) {
    void studyScreens(root, api, existing);
  } else {
    identifyScreen(root, (id) => void studyScreens(root, api, id));
  }
}

const appRoot = document.getElementById("app");
if (appRoot) boot(appRoot);
