/** Form state for the annotation screen.
 *
 * The save status walks clean -> dirty -> saving -> saved | error, and
 * nothing else: every save is preceded by an edit (or an explicit retry,
 * which re-dirties the form), and a result state can only be reached
 * from saving. Illegal jumps throw instead of silently corrupting the
 * screen.
 */

import type { ProposalView } from "./api.js";

export type SaveStatus = "clean" | "dirty" | "saving" | "saved" | "error";

export class TransitionError extends Error {
  constructor(from: SaveStatus, to: SaveStatus) {
    super(`illegal save-status transition ${from} -> ${to}`);
    this.name = "TransitionError";
  }
}

export interface FormState {
  proposalId: string;
  checked: Set<string>;
  status: SaveStatus;
  /** descriptor ids rejected by the last save attempt */
  offenders: Set<string>;
  /** server/network message from the last failed save */
  message: string | null;
}

export function createForm(proposalId: string): FormState {
  return {
    proposalId,
    checked: new Set(),
    status: "clean",
    offenders: new Set(),
    message: null,
  };
}

function enter(form: FormState, to: SaveStatus, legalFrom: SaveStatus[]): void {
  if (!legalFrom.includes(form.status)) {
    throw new TransitionError(form.status, to);
  }
  form.status = to;
}

/** Flip one checkbox. Only ids from the taxonomy may ever be checked. */
export function toggleDescriptor(
  form: FormState,
  id: string,
  taxonomyIds: ReadonlySet<string>,
): void {
  if (!taxonomyIds.has(id)) {
    throw new Error(`unknown descriptor id: ${id}`);
  }
  enter(form, "dirty", ["clean", "dirty", "saved", "error"]);
  if (form.checked.has(id)) {
    form.checked.delete(id);
  } else {
    form.checked.add(id);
  }
  // editing a flagged descriptor clears its highlight; others stay
  form.offenders.delete(id);
}

/** Re-dirty the form without changing the checked set (retry after error). */
export function touch(form: FormState): void {
  enter(form, "dirty", ["clean", "dirty", "saved", "error"]);
}

export function beginSave(form: FormState): void {
  enter(form, "saving", ["dirty"]);
}

export function saveSucceeded(form: FormState): void {
  enter(form, "saved", ["saving"]);
  form.offenders.clear();
  form.message = null;
}

export function saveFailed(
  form: FormState,
  message: string,
  offenders: string[] = [],
): void {
  enter(form, "error", ["saving"]);
  form.message = message;
  form.offenders = new Set(offenders);
}

export function hasUnsavedWork(form: FormState): boolean {
  return form.status === "dirty" || form.status === "saving" || form.status === "error";
}

export interface ProgressEntry {
  referentId: string;
  referentLabel: string;
  annotated: number;
  total: number;
}

/** Per-referent annotated/total counts, referents in first-seen order. */
export function progressByReferent(proposals: ProposalView[]): ProgressEntry[] {
  const byId = new Map<string, ProgressEntry>();
  for (const proposal of proposals) {
    let entry = byId.get(proposal.referent_id);
    if (!entry) {
      entry = {
        referentId: proposal.referent_id,
        referentLabel: proposal.referent_label,
        annotated: 0,
        total: 0,
      };
      byId.set(proposal.referent_id, entry);
    }
    entry.total += 1;
    if (proposal.annotated) entry.annotated += 1;
  }
  return [...byId.values()];
}
