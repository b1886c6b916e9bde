/** Display formatting. Truth values are fetched, never recomputed; the
 * only transformation allowed here is turning API numbers into the
 * same byte sequence the API serialized. */

/** Float-typed API fields (scores, intensities, heights). The backend
 * serializes them in shortest round-trip form with a trailing `.0` for
 * integral values; mirror that exactly so displayed text byte-matches
 * the response. */
export function fmtScore(value: number): string {
  return Number.isInteger(value) ? value.toFixed(1) : String(value);
}

/** Integer-typed API fields (counts). */
export function fmtCount(value: number): string {
  return String(value);
}

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}
