/** Annotation screen: play the proposal's clip (when there is one) and
 * tick the descriptors that are present. */

import { ApiClient, ApiError, Descriptor, ProposalView, Taxonomy } from "./api.js";
import { el } from "./dom.js";
import {
  FormState,
  beginSave,
  createForm,
  hasUnsavedWork,
  saveFailed,
  saveSucceeded,
  toggleDescriptor,
  touch,
} from "./state.js";

export interface DescriptorGroup {
  category: string;
  hands: { hand: string; descriptors: Descriptor[] }[];
}

/** Group by category, then by hand, both in first-appearance order, so
 * the screen always mirrors the taxonomy file. */
export function groupDescriptors(taxonomy: Taxonomy): DescriptorGroup[] {
  const groups: DescriptorGroup[] = [];
  const byCategory = new Map<string, DescriptorGroup>();
  for (const descriptor of taxonomy.descriptors) {
    let group = byCategory.get(descriptor.category);
    if (!group) {
      group = { category: descriptor.category, hands: [] };
      byCategory.set(descriptor.category, group);
      groups.push(group);
    }
    let hand = group.hands.find((h) => h.hand === descriptor.hand);
    if (!hand) {
      hand = { hand: descriptor.hand, descriptors: [] };
      group.hands.push(hand);
    }
    hand.descriptors.push(descriptor);
  }
  return groups;
}

const STATUS_TEXT: Record<FormState["status"], string> = {
  clean: "no changes",
  dirty: "unsaved changes",
  saving: "saving...",
  saved: "saved",
  error: "save failed",
};

export interface AnnotateOptions {
  api: ApiClient;
  annotatorId: string;
  /** called once every proposal in the queue is annotated */
  onAllDone?: () => void;
}

export class AnnotateScreen {
  form: FormState | null = null;
  /** resolves when the in-flight submit settles; tests await this */
  lastSubmit: Promise<void> | null = null;

  private queue: ProposalView[] = [];
  private index = -1;
  private readonly taxonomyIds: Set<string>;

  constructor(
    private readonly root: HTMLElement,
    private readonly taxonomy: Taxonomy,
    private readonly opts: AnnotateOptions,
  ) {
    this.taxonomyIds = new Set(taxonomy.descriptors.map((d) => d.id));
  }

  start(proposals: ProposalView[]): void {
    this.queue = proposals;
    this.index = proposals.findIndex((p) => !p.annotated);
    if (this.index === -1) {
      this.renderDone();
      return;
    }
    this.form = createForm(this.current().id);
    this.render();
  }

  current(): ProposalView {
    const proposal = this.queue[this.index];
    if (!proposal) throw new Error("no current proposal");
    return proposal;
  }

  hasUnsavedChanges(): boolean {
    return this.form !== null && hasUnsavedWork(this.form);
  }

  async submitCurrent(): Promise<void> {
    const form = this.form;
    if (!form) return;
    // a deliberate save of an untouched form submits the empty set, and
    // a retry after an error resubmits the same set; both count as edits
    if (form.status === "clean" || form.status === "error") touch(form);
    if (form.status !== "dirty") return;
    const proposal = this.current();
    // keep the wire order canonical: taxonomy order, not click order
    const descriptorIds = this.taxonomy.descriptors
      .map((d) => d.id)
      .filter((id) => form.checked.has(id));
    beginSave(form);
    this.render();
    try {
      await this.opts.api.submitAnnotation(
        proposal.id,
        this.opts.annotatorId,
        descriptorIds,
      );
      saveSucceeded(form);
      proposal.annotated = true;
      this.advance();
    } catch (err) {
      if (err instanceof ApiError) {
        saveFailed(form, err.message, err.offenders);
      } else {
        saveFailed(form, "could not reach the annotation service");
      }
      this.render();
    }
  }

  private advance(): void {
    const next = this.queue.findIndex((p) => !p.annotated);
    if (next === -1) {
      this.form = null;
      this.renderDone();
      this.opts.onAllDone?.();
      return;
    }
    this.index = next;
    this.form = createForm(this.current().id);
    this.render();
  }

  private renderDone(): void {
    this.root.replaceChildren(
      el("section", { class: "panel done-state" }, [
        el("p", {}, ["Every proposal is annotated. Check the progress tab for the live report."]),
      ]),
    );
  }

  private render(): void {
    const form = this.form;
    if (!form) return;
    if (this.taxonomy.descriptors.length === 0) {
      this.root.replaceChildren(
        el("section", { class: "panel empty-state" }, [
          el("p", {}, [
            "The descriptor taxonomy for this study is empty, so there is nothing to annotate.",
          ]),
        ]),
      );
      return;
    }
    const proposal = this.current();
    const annotated = this.queue.filter((p) => p.annotated).length;

    const header = el("header", { class: "proposal-head" }, [
      el("h2", {}, [proposal.referent_label]),
      el("p", { class: "meta" }, [
        `participant ${proposal.participant_id}, proposal ${proposal.id}`,
      ]),
      el("p", { class: "overall-progress" }, [
        `${annotated} of ${this.queue.length} proposals annotated`,
      ]),
    ]);

    const media = el("div", { class: "media-box" }, [
      proposal.media_ref
        ? el("video", { class: "media-player", controls: "", src: proposal.media_ref })
        : el("div", { class: "media-placeholder" }, [
            "No recording attached; annotate from the proposal description.",
          ]),
    ]);

    const saving = form.status === "saving";
    const formEl = el("form", { class: "descriptors" }) as HTMLFormElement;
    for (const group of groupDescriptors(this.taxonomy)) {
      const fieldset = el("fieldset", { "data-category": group.category }, [
        el("legend", {}, [group.category.replace(/_/g, " ")]),
      ]);
      for (const hand of group.hands) {
        const handBox = el("div", { class: "hand-group", "data-hand": hand.hand }, [
          el("h4", {}, [hand.hand === "none" ? "either hand" : hand.hand.replace(/_/g, " ")]),
        ]);
        for (const descriptor of hand.descriptors) {
          const input = el("input", {
            type: "checkbox",
            "data-descriptor-id": descriptor.id,
          }) as HTMLInputElement;
          input.checked = form.checked.has(descriptor.id);
          input.disabled = saving;
          input.addEventListener("change", () => {
            toggleDescriptor(form, descriptor.id, this.taxonomyIds);
            this.refreshChrome();
          });
          const label = el("label", {}, [input, descriptor.label]);
          if (form.offenders.has(descriptor.id)) label.classList.add("offender");
          handBox.appendChild(label);
        }
        fieldset.appendChild(handBox);
      }
      formEl.appendChild(fieldset);
    }

    const submitBtn = el("button", { class: "submit-btn", type: "submit" }, [
      form.status === "error" ? "Retry" : "Save and continue",
    ]) as HTMLButtonElement;
    submitBtn.disabled = !(form.status === "dirty" || form.status === "error" || form.status === "clean");
    const statusEl = el("span", { class: "save-status", "data-status": form.status }, [
      STATUS_TEXT[form.status],
    ]);
    formEl.appendChild(el("footer", { class: "save-bar" }, [submitBtn, statusEl]));

    formEl.addEventListener("submit", (event) => {
      event.preventDefault();
      this.lastSubmit = this.submitCurrent();
    });
    formEl.addEventListener("keydown", (event) => this.moveFocus(event));

    const children: (HTMLElement | string)[] = [header, media, formEl];
    if (form.message) {
      children.push(el("div", { class: "banner", role: "alert" }, [form.message]));
    }
    this.root.replaceChildren(el("section", { class: "panel annotate" }, children));
  }

  /** Cheap partial update after a checkbox flip: status chip, button,
   * offender highlight. Avoids rebuilding inputs mid-interaction. */
  private refreshChrome(): void {
    const form = this.form;
    if (!form) return;
    const statusEl = this.root.querySelector<HTMLElement>(".save-status");
    if (statusEl) {
      statusEl.dataset.status = form.status;
      statusEl.textContent = STATUS_TEXT[form.status];
    }
    const submitBtn = this.root.querySelector<HTMLButtonElement>(".submit-btn");
    if (submitBtn) {
      submitBtn.disabled = false;
      submitBtn.textContent = "Save and continue";
    }
    for (const label of this.root.querySelectorAll<HTMLElement>("label.offender")) {
      const input = label.querySelector<HTMLInputElement>("input[data-descriptor-id]");
      if (input && !form.offenders.has(input.dataset.descriptorId ?? "")) {
        label.classList.remove("offender");
      }
    }
  }

  /** Arrow keys walk the checkbox list. */
  private moveFocus(event: KeyboardEvent): void {
    if (event.key !== "ArrowDown" && event.key !== "ArrowUp") return;
    const inputs = [
      ...this.root.querySelectorAll<HTMLInputElement>("input[data-descriptor-id]"),
    ];
    const at = inputs.findIndex((input) => input === document.activeElement);
    if (at === -1) return;
    const next = event.key === "ArrowDown" ? at + 1 : at - 1;
    if (next < 0 || next >= inputs.length) return;
    event.preventDefault();
    inputs[next]?.focus();
  }
}

