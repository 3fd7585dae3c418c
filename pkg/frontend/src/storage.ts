/** The annotator identifies once; the id lives in browser storage. */

const KEY = "annotation-ui.annotator-id";

export function loadAnnotatorId(storage: Storage = localStorage): string | null {
  const value = storage.getItem(KEY);
  return value && value.trim() ? value : null;
}

export function saveAnnotatorId(id: string, storage: Storage = localStorage): void {
  storage.setItem(KEY, id.trim());
}

export function clearAnnotatorId(storage: Storage = localStorage): void {
  storage.removeItem(KEY);
}
