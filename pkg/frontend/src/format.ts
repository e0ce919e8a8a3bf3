/** Display helpers for attribute names and numbers. */

/** Split a "field=value" count attribute into its parts, honoring the
 * backslash escaping used when names are built; null for plain names. */
export function splitCountAttribute(name: string): { field: string; value: string } | null {
  let field = "";
  let i = 0;
  while (i < name.length) {
    const ch = name[i];
    if (ch === "\\" && i + 1 < name.length) {
      field += name[i + 1];
      i += 2;
      continue;
    }
    if (ch === "=") {
      return { field, value: name.slice(i + 1) };
    }
    field += ch;
    i += 1;
  }
  return null;
}

/** "BaseFileName" -> "Base File Name"; leaves snake/plain names readable. */
export function humanizeField(field: string): string {
  return field
    .replace(/_/g, " ")
    .replace(/([a-z0-9])([A-Z])/g, "$1 $2")
    .trim();
}

export function formatScore(score: number): string {
  return score.toFixed(2);
}

export function formatStability(value: number): string {
  if (value >= 1000 || (value > 0 && value < 0.01)) return value.toExponential(2);
  return value.toFixed(2);
}
