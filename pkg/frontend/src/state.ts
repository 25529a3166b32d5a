/** Form state for one image, persisted locally so refreshes lose nothing. */

import { defaultAnnotation } from "./rules";
import { Annotation, TaxonomySchema, Violation } from "./types";

const STORAGE_PREFIX = "hairmony:annotation:";

export interface FormState {
  imageId: string;
  annotation: Annotation;
  activeRegion: string;
  violations: Violation[];
  submitting: boolean;
}

export function newFormState(schema: TaxonomySchema, imageId: string): FormState {
  const restored = restore(schema, imageId);
  return {
    imageId,
    annotation: restored ?? defaultAnnotation(schema),
    activeRegion: schema.regions[0],
    violations: [],
    submitting: false,
  };
}

/** Keep the draft annotation across page reloads, keyed by image id. */
export function persist(state: FormState): void {
  try {
    localStorage.setItem(
      STORAGE_PREFIX + state.imageId,
      JSON.stringify(state.annotation),
    );
  } catch {
    // storage may be unavailable (private mode); drafts just won't survive
  }
}

export function restore(
  schema: TaxonomySchema,
  imageId: string,
): Annotation | null {
  try {
    const raw = localStorage.getItem(STORAGE_PREFIX + imageId);
    if (!raw) return null;
    const parsed = JSON.parse(raw) as Annotation;
    // discard drafts that no longer fit the schema
    const fresh = defaultAnnotation(schema);
    for (const name of Object.keys(fresh.global)) {
      if (typeof parsed.global?.[name] !== "string") return null;
    }
    for (const region of Object.keys(fresh.regions)) {
      for (const name of Object.keys(fresh.regions[region])) {
        if (typeof parsed.regions?.[region]?.[name] !== "string") return null;
      }
    }
    return parsed;
  } catch {
    return null;
  }
}

export function clearDraft(imageId: string): void {
  try {
    localStorage.removeItem(STORAGE_PREFIX + imageId);
  } catch {
    // ignore
  }
}
