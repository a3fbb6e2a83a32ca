import type { ContextJson, ContextSpec, TaxonomyResponse } from "./types";

/**
 * Build the ordered context list from the service's taxonomy: one context
 * per component (comparing its quantities), then one per quantity
 * (comparing the components that report it). Item order follows the
 * taxonomy response so every client renders the same matrices.
 */
export function buildContexts(taxonomy: TaxonomyResponse): ContextSpec[] {
  const contexts: ContextSpec[] = [];
  for (const component of taxonomy.components) {
    const items = taxonomy.applicability[component] ?? [];
    contexts.push({
      key: `quantities_within_component:${component}`,
      kind: "quantities_within_component",
      subject: component,
      items: [...items],
    });
  }
  for (const quantity of taxonomy.quantities) {
    const items = taxonomy.components.filter((c) =>
      (taxonomy.applicability[c] ?? []).includes(quantity),
    );
    contexts.push({
      key: `components_within_quantity:${quantity}`,
      kind: "components_within_quantity",
      subject: quantity,
      items,
    });
  }
  return contexts;
}

export function contextJson(spec: ContextSpec): ContextJson {
  return spec.kind === "quantities_within_component"
    ? { kind: spec.kind, component: spec.subject }
    : { kind: spec.kind, quantity: spec.subject };
}

/** Human heading, e.g. "Generator: compare its quantities". */
export function contextTitle(spec: ContextSpec): string {
  const subject = spec.subject.replaceAll("_", " ").toLowerCase();
  return spec.kind === "quantities_within_component"
    ? `${subject}: compare its quantities`
    : `${subject}: compare the components reporting it`;
}

export function pairCount(spec: ContextSpec): number {
  const n = spec.items.length;
  return (n * (n - 1)) / 2;
}
