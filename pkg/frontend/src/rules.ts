/**
 * Client-side evaluation of the schema's consistency rules.
 *
 * The rules arrive as data inside the served taxonomy document and are
 * interpreted by the same little predicate language the service uses, so
 * client and server verdicts agree by construction. On top of plain
 * validation this module derives per-slot constraints (forced to N/A, or
 * required) by probing: a slot is forced when every concrete value would
 * add a violation that N/A avoids, and required when N/A itself adds one.
 */

import {
  Annotation,
  AttributeDef,
  ConsistencyRule,
  NA,
  Predicate,
  SlotPredicate,
  TaxonomySchema,
  Violation,
} from "./types";

/** Value list at runtime: conditional attributes gain the N/A sentinel. */
export function runtimeValues(attr: AttributeDef): string[] {
  return attr.allows_na ? [...attr.values, NA] : [...attr.values];
}

export function attributeByName(
  schema: TaxonomySchema,
  name: string,
): AttributeDef {
  const found =
    schema.global_attributes.find((a) => a.name === name) ??
    schema.regional_attributes.find((a) => a.name === name);
  if (!found) throw new Error(`unknown attribute ${name}`);
  return found;
}

function isGlobal(schema: TaxonomySchema, name: string): boolean {
  return schema.global_attributes.some((a) => a.name === name);
}

function slotValue(
  schema: TaxonomySchema,
  ann: Annotation,
  pred: SlotPredicate,
  region: string | null,
): string {
  if (isGlobal(schema, pred.slot)) return ann.global[pred.slot];
  if (region === null) throw new Error(`regional slot ${pred.slot} outside a region`);
  return ann.regions[region][pred.slot];
}

function evalPredicate(
  schema: TaxonomySchema,
  ann: Annotation,
  pred: Predicate,
  region: string | null,
): boolean {
  if ("const" in pred) return Boolean(pred.const);
  if ("all" in pred) return pred.all.every((p) => evalPredicate(schema, ann, p, region));
  if ("any" in pred) return pred.any.some((p) => evalPredicate(schema, ann, p, region));
  if ("not" in pred) return !evalPredicate(schema, ann, pred.not, region);
  if ("all_regions" in pred) {
    return schema.regions.every((r) =>
      evalPredicate(schema, ann, pred.all_regions, r),
    );
  }
  if ("any_region" in pred) {
    return schema.regions.some((r) =>
      evalPredicate(schema, ann, pred.any_region, r),
    );
  }
  const actual = slotValue(schema, ann, pred, region);
  switch (pred.op) {
    case "eq":
      return actual === pred.value;
    case "ne":
      return actual !== pred.value;
    case "in":
      return (pred.values ?? []).includes(actual);
    case "not_in":
      return !(pred.values ?? []).includes(actual);
  }
}

function ruleViolations(
  schema: TaxonomySchema,
  ann: Annotation,
  rule: ConsistencyRule,
): Violation[] {
  const out: Violation[] = [];
  if (rule.scope === "per_region") {
    for (const region of schema.regions) {
      if (
        evalPredicate(schema, ann, rule.condition, region) &&
        !evalPredicate(schema, ann, rule.requirement, region)
      ) {
        out.push({ rule_id: rule.id, path: `${region}/${rule.path}`, message: rule.message });
      }
    }
  } else if (
    evalPredicate(schema, ann, rule.condition, null) &&
    !evalPredicate(schema, ann, rule.requirement, null)
  ) {
    out.push({ rule_id: rule.id, path: rule.path, message: rule.message });
  }
  return out;
}

/** Every rule violation in deterministic order; empty means consistent. */
export function validateAnnotation(
  schema: TaxonomySchema,
  ann: Annotation,
): Violation[] {
  return schema.rules.flatMap((rule) => ruleViolations(schema, ann, rule));
}

export type SlotConstraint = "free" | "forced-na" | "required";

function cloneWith(
  ann: Annotation,
  region: string | null,
  attribute: string,
  value: string,
): Annotation {
  if (region === null) {
    return { ...ann, global: { ...ann.global, [attribute]: value } };
  }
  return {
    ...ann,
    regions: {
      ...ann.regions,
      [region]: { ...ann.regions[region], [attribute]: value },
    },
  };
}

/**
 * Constraint for one conditionally-applicable slot under the current
 * selections: compare the violation count with the slot at N/A against
 * the best achievable count over its concrete values.
 */
export function slotConstraint(
  schema: TaxonomySchema,
  ann: Annotation,
  region: string | null,
  attr: AttributeDef,
): SlotConstraint {
  if (!attr.allows_na) return "free";
  const withNa = validateAnnotation(
    schema,
    cloneWith(ann, region, attr.name, NA),
  ).length;
  let best = Infinity;
  for (const value of attr.values) {
    const count = validateAnnotation(
      schema,
      cloneWith(ann, region, attr.name, value),
    ).length;
    best = Math.min(best, count);
    if (best === 0) break;
  }
  if (best > withNa) return "forced-na";
  if (withNa > best) return "required";
  return "free";
}

/** Default selections: sentinel for conditional slots, first value otherwise. */
export function defaultAnnotation(schema: TaxonomySchema): Annotation {
  const pick = (attr: AttributeDef) => (attr.allows_na ? NA : attr.values[0]);
  const global: Record<string, string> = {};
  for (const attr of schema.global_attributes) global[attr.name] = pick(attr);
  const regions: Record<string, Record<string, string>> = {};
  for (const region of schema.regions) {
    regions[region] = {};
    for (const attr of schema.regional_attributes) {
      regions[region][attr.name] = pick(attr);
    }
  }
  return { global, regions };
}
