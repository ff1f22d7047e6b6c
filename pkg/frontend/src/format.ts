/** Number display.
 *
 * The console computes no metric and reformats none: every displayed number
 * is the payload value stringified as-is, so it stays traceable to the API
 * field it came from.
 */

export function showNumber(value: number): string {
  return String(value);
}
