import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { AnnotateScreen, groupDescriptors } from "../src/annotate.js";
import { MockApi, TAXONOMY } from "./mock_api.js";

function setup(mock = new MockApi()) {
  const client = new ApiClient("/api", mock.fetch);
  const root = document.createElement("div");
  document.body.replaceChildren(root);
  const screen = new AnnotateScreen(root, mock.taxonomy, {
    api: client,
    annotatorId: "eve",
  });
  screen.start(mock.proposals);
  return { mock, client, root, screen };
}

function box(root: HTMLElement, id: string): HTMLInputElement {
  const input = root.querySelector<HTMLInputElement>(
    `input[data-descriptor-id="${id}"]`,
  );
  if (!input) throw new Error(`no checkbox for ${id}`);
  return input;
}

beforeEach(() => {
  document.body.innerHTML = "";
});

describe("rendering", () => {
  it("shows one fieldset per category, hands sub-grouped", () => {
    const { root } = setup();
    const fieldsets = root.querySelectorAll("fieldset[data-category]");
    expect([...fieldsets].map((f) => f.getAttribute("data-category"))).toEqual([
      "movement",
      "orientation",
      "hand_state",
      "other",
    ]);
    const hands = root.querySelectorAll('fieldset[data-category="movement"] .hand-group');
    expect(hands).toHaveLength(1);
    expect(hands[0]?.getAttribute("data-hand")).toBe("dominant");
  });

  it("groups descriptors by category then hand in taxonomy order", () => {
    const groups = groupDescriptors(TAXONOMY);
    expect(groups.map((g) => g.category)).toEqual([
      "movement",
      "orientation",
      "hand_state",
      "other",
    ]);
    expect(groups[0]?.hands[0]?.descriptors.map((d) => d.id)).toEqual(["first"]);
  });

  it("shows a placeholder when the proposal has no media", () => {
    const { root } = setup();
    expect(root.querySelector(".media-placeholder")).not.toBeNull();
    expect(root.querySelector("video")).toBeNull();
  });

  it("shows a player when the proposal has a clip", async () => {
    const mock = new MockApi();
    const { root, screen } = setup(mock);
    await screen.submitCurrent(); // p1 done, advance to p2 which has media
    expect(root.querySelector("video")?.getAttribute("src")).toBe("clips/p2.mp4");
    expect(root.querySelector(".media-placeholder")).toBeNull();
  });

  it("explains an empty taxonomy instead of rendering a blank form", () => {
    const mock = new MockApi({ version: "ui-test-v1", descriptors: [] });
    const { root } = setup(mock);
    expect(root.textContent).toContain("empty");
    expect(root.querySelectorAll("input")).toHaveLength(0);
  });

  it("skips proposals that are already annotated", () => {
    const mock = new MockApi();
    const first = mock.proposals[0];
    if (first) first.annotated = true;
    const { root } = setup(mock);
    expect(root.textContent).toContain("participant u2");
  });
});

describe("submitting", () => {
  it("stores [1,0,1,0] for the checked set {first, third}, in any click order", async () => {
    const { mock, client, root, screen } = setup();
    box(root, "third").click();
    box(root, "first").click();
    expect(screen.hasUnsavedChanges()).toBe(true);

    const form = root.querySelector("form.descriptors");
    form?.dispatchEvent(new Event("submit", { bubbles: true, cancelable: true }));
    await screen.lastSubmit;

    expect(mock.vectorFor("p1")).toEqual([1, 0, 1, 0]);
    const proposals = await client.proposals();
    expect(proposals.find((p) => p.id === "p1")?.annotated).toBe(true);
  });

  it("stores the all-zero vector for a deliberately empty set", async () => {
    const { mock, screen } = setup();
    await screen.submitCurrent();
    expect(mock.store.get("p1")).toEqual([]);
    expect(mock.vectorFor("p1")).toEqual([0, 0, 0, 0]);
  });

  it("highlights 422 offenders without losing the checked set", async () => {
    const { mock, root, screen } = setup();
    box(root, "first").click();
    box(root, "third").click();
    mock.failNextWith = {
      status: 422,
      detail: "unknown descriptor ids: third",
      offenders: ["third"],
    };
    await screen.submitCurrent();

    expect(box(root, "first").checked).toBe(true);
    expect(box(root, "third").checked).toBe(true);
    expect(box(root, "third").closest("label")?.classList.contains("offender")).toBe(true);
    expect(box(root, "first").closest("label")?.classList.contains("offender")).toBe(false);
    expect(root.querySelector(".banner")?.textContent).toContain("unknown descriptor ids");
    expect(root.querySelector(".save-status")?.getAttribute("data-status")).toBe("error");

    // retry resubmits the same set and succeeds
    await screen.submitCurrent();
    expect(mock.vectorFor("p1")).toEqual([1, 0, 1, 0]);
  });

  it("keeps state and shows a banner when the service is unreachable", async () => {
    const { mock, root, screen } = setup();
    box(root, "second").click();
    mock.offline = true;
    await screen.submitCurrent();

    expect(root.querySelector(".banner")?.textContent).toContain("could not reach");
    expect(box(root, "second").checked).toBe(true);
    expect(screen.hasUnsavedChanges()).toBe(true);

    mock.offline = false;
    await screen.submitCurrent();
    expect(mock.store.get("p1")).toEqual(["second"]);
  });

  it("advances to the next unannotated proposal and bumps the counter", async () => {
    const { root, screen } = setup();
    expect(root.textContent).toContain("0 of 2 proposals annotated");
    expect(root.textContent).toContain("participant u1");

    box(root, "first").click();
    await screen.submitCurrent();

    expect(root.textContent).toContain("participant u2");
    expect(root.textContent).toContain("1 of 2 proposals annotated");
    expect(screen.hasUnsavedChanges()).toBe(false);
    expect(root.querySelectorAll("input:checked")).toHaveLength(0);
  });

  it("reports completion once every proposal is saved", async () => {
    let done = 0;
    const mock = new MockApi();
    const client = new ApiClient("/api", mock.fetch);
    const root = document.createElement("div");
    document.body.replaceChildren(root);
    const screen = new AnnotateScreen(root, mock.taxonomy, {
      api: client,
      annotatorId: "eve",
      onAllDone: () => (done += 1),
    });
    screen.start(mock.proposals);

    await screen.submitCurrent();
    await screen.submitCurrent();
    expect(done).toBe(1);
    expect(root.textContent).toContain("Every proposal is annotated");
    expect(mock.putCount).toBe(2);
  });
});

describe("keyboard navigation", () => {
  it("moves focus between descriptors with the arrow keys", () => {
    const { root } = setup();
    const first = box(root, "first");
    const second = box(root, "second");
    first.focus();
    first.dispatchEvent(
      new KeyboardEvent("keydown", { key: "ArrowDown", bubbles: true, cancelable: true }),
    );
    expect(document.activeElement).toBe(second);
    second.dispatchEvent(
      new KeyboardEvent("keydown", { key: "ArrowUp", bubbles: true, cancelable: true }),
    );
    expect(document.activeElement).toBe(first);
  });
});
