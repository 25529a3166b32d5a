/** Wire types shared with the annotation service. */

export type Op = "eq" | "ne" | "in" | "not_in";

export interface SlotPredicate {
  slot: string;
  op: Op;
  value?: string;
  values?: string[];
}

export type Predicate =
  | { const: boolean }
  | { all: Predicate[] }
  | { any: Predicate[] }
  | { not: Predicate }
  | { all_regions: SlotPredicate }
  | { any_region: SlotPredicate }
  | SlotPredicate;

export interface AttributeDef {
  name: string;
  values: string[];
  ordinal?: boolean;
  allows_na?: boolean;
}

export interface ConsistencyRule {
  id: string;
  scope: "global" | "per_region";
  path: string;
  condition: Predicate;
  requirement: Predicate;
  message: string;
}

export interface TaxonomySchema {
  version: string;
  regions: string[];
  global_attributes: AttributeDef[];
  regional_attributes: AttributeDef[];
  rules: ConsistencyRule[];
}

export interface Annotation {
  style_id?: string;
  global: Record<string, string>;
  regions: Record<string, Record<string, string>>;
}

export interface Violation {
  rule_id: string;
  path: string;
  message: string;
}

export interface Task {
  image_id: string;
  image_url: string;
}

export interface Progress {
  total: number;
  done: number;
  pending: number;
}

export const NA = "N/A";
