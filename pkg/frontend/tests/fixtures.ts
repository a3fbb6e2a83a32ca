import type { TaxonomyResponse } from "../src/types";

// Mirror of GET /api/taxonomy; the integration test asserts the live
// service still serves exactly this shape.
export const TAXONOMY: TaxonomyResponse = {
  quantities: ["MW", "MVAR", "KV", "TAP", "STATUS"],
  components: [
    "UNIT_LOAD_TRANSFORMER",
    "TRANSMISSION_TRANSFORMER",
    "GENERATOR",
    "TRANSMISSION_LINE",
    "REACTOR_CAPACITOR",
    "BUSBAR",
  ],
  tags: { F: "FAULTY", N: "NON_CURRENT", V: "VALID", I: "INVALID", M: "MANUAL" },
  applicability: {
    UNIT_LOAD_TRANSFORMER: ["MVAR", "MW", "STATUS", "TAP"],
    TRANSMISSION_TRANSFORMER: ["MVAR", "MW", "STATUS", "TAP"],
    GENERATOR: ["KV", "MVAR", "MW", "STATUS"],
    TRANSMISSION_LINE: ["KV", "MVAR", "MW", "STATUS"],
    REACTOR_CAPACITOR: ["MVAR", "STATUS"],
    BUSBAR: ["KV", "STATUS"],
  },
  pair_count: 20,
};
