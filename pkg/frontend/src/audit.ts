// DOM numeral audit: every number visible in an analysis view must come
// from an API payload, never from client-side arithmetic.

const NUMERAL = /\d+(?:\.\d+)?/g;

function textNodesOf(root: Node): string[] {
  const out: string[] = [];
  const walk = (node: Node): void => {
    if (node.nodeType === 3 && node.textContent) {
      out.push(node.textContent);
    }
    node.childNodes.forEach(walk);
  };
  walk(root);
  return out;
}

/** All numerals rendered inside root, as written. */
export function domNumerals(root: Node): Set<string> {
  const found = new Set<string>();
  for (const text of textNodesOf(root)) {
    for (const match of text.matchAll(NUMERAL)) {
      found.add(match[0]);
    }
  }
  return found;
}

/** Every numeral a payload could legitimately contribute: its numbers
 *  (as JS renders them) and numerals embedded in its string values. */
export function payloadNumerals(payload: unknown): Set<string> {
  const found = new Set<string>();
  const visit = (value: unknown): void => {
    if (typeof value === "number") {
      found.add(String(value));
      // a float like 0.5 may be printed via its string form anywhere
      for (const match of String(value).matchAll(NUMERAL)) {
        found.add(match[0]);
      }
    } else if (typeof value === "string") {
      for (const match of value.matchAll(NUMERAL)) {
        found.add(match[0]);
      }
    } else if (Array.isArray(value)) {
      value.forEach(visit);
    } else if (value !== null && typeof value === "object") {
      Object.entries(value as Record<string, unknown>).forEach(([k, v]) => {
        for (const match of k.matchAll(NUMERAL)) {
          found.add(match[0]);
        }
        visit(v);
      });
    }
  };
  visit(payload);
  return found;
}

/** Numerals in the DOM that no given payload accounts for. */
export function auditNumerals(root: Node, payloads: unknown[]): string[] {
  const allowed = new Set<string>();
  for (const payload of payloads) {
    for (const numeral of payloadNumerals(payload)) {
      allowed.add(numeral);
    }
  }
  return [...domNumerals(root)].filter((numeral) => !allowed.has(numeral)).sort();
}
