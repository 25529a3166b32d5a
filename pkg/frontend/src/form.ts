/**
 * Schema-driven annotation form.
 *
 * Nothing here is hand-coded per attribute: the whole form is generated
 * from the served taxonomy, so extending the schema needs no UI change.
 * One select per slot, values in schema order; region tabs expose the
 * regional slots, a "copy to all regions" action and per-region progress
 * dots cut down the clicking. Conditionally inapplicable slots lock to
 * N/A until their trigger enables them; violations render inline at the
 * offending control.
 */

import {
  attributeByName,
  runtimeValues,
  slotConstraint,
  validateAnnotation,
} from "./rules";
import { FormState, persist } from "./state";
import { AttributeDef, NA, TaxonomySchema, Violation } from "./types";

export interface FormCallbacks {
  onSubmit: () => void;
}

function slotId(region: string | null, attribute: string): string {
  const path = region === null ? attribute : `${region}/${attribute}`;
  return "slot-" + path.replace(/[^a-zA-Z0-9]+/g, "-").toLowerCase();
}

function violationsFor(
  violations: Violation[],
  region: string | null,
  attribute: string,
): Violation[] {
  const path = region === null ? attribute : `${region}/${attribute}`;
  return violations.filter((v) => v.path === path);
}

function renderSelect(
  schema: TaxonomySchema,
  state: FormState,
  region: string | null,
  attr: AttributeDef,
): HTMLElement {
  const wrap = document.createElement("div");
  wrap.className = "slot";
  const id = slotId(region, attr.name);

  const label = document.createElement("label");
  label.htmlFor = id;
  label.textContent = attr.name;
  wrap.appendChild(label);

  const select = document.createElement("select");
  select.id = id;
  select.dataset.region = region ?? "";
  select.dataset.attribute = attr.name;
  for (const value of runtimeValues(attr)) {
    const option = document.createElement("option");
    option.value = value;
    option.textContent = value;
    select.appendChild(option);
  }
  const current =
    region === null
      ? state.annotation.global[attr.name]
      : state.annotation.regions[region][attr.name];
  select.value = current;

  const constraint = slotConstraint(schema, state.annotation, region, attr);
  if (constraint === "forced-na") {
    select.disabled = true;
    select.value = NA;
    wrap.classList.add("inapplicable");
  } else if (constraint === "required") {
    wrap.classList.add("required");
    label.textContent = attr.name + " *";
  }
  wrap.appendChild(select);

  for (const violation of violationsFor(state.violations, region, attr.name)) {
    const msg = document.createElement("p");
    msg.className = "violation";
    msg.dataset.ruleId = violation.rule_id;
    msg.textContent = `${violation.rule_id}: ${violation.message}`;
    wrap.appendChild(msg);
  }
  return wrap;
}

function regionComplete(state: FormState, region: string): boolean {
  return !state.violations.some((v) => v.path.startsWith(region + "/"));
}

export function renderForm(
  container: HTMLElement,
  schema: TaxonomySchema,
  state: FormState,
  callbacks: FormCallbacks,
): void {
  container.textContent = "";
  const form = document.createElement("form");
  form.id = "annotation-form";
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    callbacks.onSubmit();
  });

  const globalSection = document.createElement("section");
  globalSection.id = "global-attributes";
  const globalHeading = document.createElement("h2");
  globalHeading.textContent = "Whole-style attributes";
  globalSection.appendChild(globalHeading);
  for (const attr of schema.global_attributes) {
    globalSection.appendChild(renderSelect(schema, state, null, attr));
  }
  form.appendChild(globalSection);

  const tabs = document.createElement("nav");
  tabs.id = "region-tabs";
  schema.regions.forEach((region, index) => {
    const tab = document.createElement("button");
    tab.type = "button";
    tab.className = "region-tab";
    tab.dataset.region = region;
    tab.textContent = `${index + 1}. ${region}`;
    if (region === state.activeRegion) tab.classList.add("active");
    const dot = document.createElement("span");
    dot.className = regionComplete(state, region) ? "dot ok" : "dot pending";
    tab.appendChild(dot);
    tab.addEventListener("click", () => {
      state.activeRegion = region;
      renderForm(container, schema, state, callbacks);
    });
    tabs.appendChild(tab);
  });
  form.appendChild(tabs);

  const regional = document.createElement("section");
  regional.id = "regional-attributes";
  const regionHeading = document.createElement("h2");
  regionHeading.textContent = state.activeRegion;
  regional.appendChild(regionHeading);
  for (const attr of schema.regional_attributes) {
    regional.appendChild(renderSelect(schema, state, state.activeRegion, attr));
  }
  const copy = document.createElement("button");
  copy.type = "button";
  copy.id = "copy-to-all";
  copy.textContent = "Copy this region to all regions";
  copy.addEventListener("click", () => {
    const source = state.annotation.regions[state.activeRegion];
    for (const region of schema.regions) {
      state.annotation.regions[region] = { ...source };
    }
    refresh(container, schema, state, callbacks);
  });
  regional.appendChild(copy);
  form.appendChild(regional);

  const footer = document.createElement("footer");
  const globalViolations = state.violations.filter(
    (v) => !v.path.includes("/") && !schema.global_attributes.some((a) => a.name === v.path),
  );
  for (const violation of globalViolations) {
    const msg = document.createElement("p");
    msg.className = "violation";
    msg.dataset.ruleId = violation.rule_id;
    msg.textContent = `${violation.rule_id}: ${violation.message}`;
    footer.appendChild(msg);
  }
  const submit = document.createElement("button");
  submit.type = "submit";
  submit.id = "submit-annotation";
  submit.textContent = state.submitting ? "Submitting..." : "Submit annotation";
  submit.disabled = state.violations.length > 0 || state.submitting;
  footer.appendChild(submit);
  form.appendChild(footer);

  container.appendChild(form);

  form.addEventListener("change", (event) => {
    const target = event.target as HTMLSelectElement;
    if (target.tagName !== "SELECT") return;
    const attribute = target.dataset.attribute!;
    const region = target.dataset.region || null;
    if (region === null) {
      state.annotation.global[attribute] = target.value;
    } else {
      state.annotation.regions[region][attribute] = target.value;
    }
    reconcileForcedSlots(schema, state);
    refresh(container, schema, state, callbacks);
  });
}

/** Park newly inapplicable slots at N/A so stale values can't linger. */
function reconcileForcedSlots(schema: TaxonomySchema, state: FormState): void {
  for (const attr of schema.global_attributes) {
    if (!attr.allows_na) continue;
    if (slotConstraint(schema, state.annotation, null, attr) === "forced-na") {
      state.annotation.global[attr.name] = NA;
    }
  }
  for (const region of schema.regions) {
    for (const attr of schema.regional_attributes) {
      if (!attr.allows_na) continue;
      if (slotConstraint(schema, state.annotation, region, attr) === "forced-na") {
        state.annotation.regions[region][attr.name] = NA;
      }
    }
  }
}

/** Re-validate, persist the draft, and re-render. */
export function refresh(
  container: HTMLElement,
  schema: TaxonomySchema,
  state: FormState,
  callbacks: FormCallbacks,
): void {
  state.violations = validateAnnotation(schema, state.annotation);
  persist(state);
  renderForm(container, schema, state, callbacks);
}

/** Alt+1..8 jumps between region tabs; labellers keep hands on the keys. */
export function installKeyboardNavigation(
  container: HTMLElement,
  schema: TaxonomySchema,
  state: FormState,
  callbacks: FormCallbacks,
): () => void {
  const handler = (event: KeyboardEvent) => {
    if (!event.altKey) return;
    const index = Number.parseInt(event.key, 10) - 1;
    if (Number.isNaN(index) || index < 0 || index >= schema.regions.length) return;
    event.preventDefault();
    state.activeRegion = schema.regions[index];
    renderForm(container, schema, state, callbacks);
  };
  document.addEventListener("keydown", handler);
  return () => document.removeEventListener("keydown", handler);
}

export { attributeByName, slotId };
