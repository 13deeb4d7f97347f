/**
 * The metrics panel must show the service's numbers byte-for-byte, so
 * instead of re-serializing parsed floats we cut the literal value
 * substrings out of the raw response body.
 */

function matchBraces(text: string, open: number): number {
  let depth = 0;
  let inString = false;
  for (let i = open; i < text.length; i++) {
    const c = text[i];
    if (inString) {
      if (c === "\\") i++;
      else if (c === '"') inString = false;
      continue;
    }
    if (c === '"') inString = true;
    else if (c === "{" || c === "[") depth++;
    else if (c === "}" || c === "]") {
      depth--;
      if (depth === 0) return i;
    }
  }
  throw new Error("unbalanced braces in response body");
}

/** Raw `"metrics"` object source text of the loopIndex-th loop. */
export function rawMetricsBlock(body: string, loopIndex: number): string {
  const key = '"metrics"';
  let from = 0;
  for (let n = 0; ; n++) {
    const at = body.indexOf(key, from);
    if (at < 0) {
      throw new Error(`loop ${loopIndex} has no metrics in response`);
    }
    const open = body.indexOf("{", at + key.length);
    const close = matchBraces(body, open);
    if (n === loopIndex) return body.slice(open, close + 1);
    from = close + 1;
  }
}

/** Literal value substrings keyed by metric name, exactly as served. */
export function rawMetricStrings(
  body: string,
  loopIndex: number
): Record<string, string> {
  const block = rawMetricsBlock(body, loopIndex);
  const out: Record<string, string> = {};
  const re = /"(\w+)":\s*(\[[^\]]*\]|"(?:[^"\\]|\\.)*"|[^,}\s]+)/g;
  let m: RegExpExecArray | null;
  while ((m = re.exec(block)) !== null) {
    out[m[1]] = m[2];
  }
  return out;
}

/** Number of loops in the raw body without trusting a parse step. */
export function countLoops(body: string): number {
  let count = 0;
  let from = 0;
  for (;;) {
    const at = body.indexOf('"metrics"', from);
    if (at < 0) return count;
    count++;
    from = at + 9;
  }
}
