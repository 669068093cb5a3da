/** Charset handling for fetched page bytes.
 *
 * A browser decodes the document before a content script sees it, but any
 * caller holding raw bytes (tests, fixture tooling, non-extension embeddings)
 * must honor the page's declared encoding — several large Q&A sites still
 * serve legacy charsets such as gb2312. We refuse to guess: no declaration
 * means UTF-8, and an unknown label is an error rather than mojibake.
 */

/** How far into the document a charset declaration is honored. */
const SNIFF_WINDOW = 2048;

const META_CHARSET = /<meta[^>]+charset\s*=\s*["']?([a-zA-Z0-9._-]+)/i;

/**
 * Read the charset declared in the document head, if any. Works on the raw
 * bytes: charset declarations are ASCII by construction, so an ASCII-only
 * view of the first bytes is enough to find them in any ASCII-compatible
 * encoding.
 */
export function sniffCharset(bytes: Uint8Array): string | null {
  const head = bytes.subarray(0, SNIFF_WINDOW);
  let ascii = "";
  for (const b of head) {
    ascii += b < 0x80 ? String.fromCharCode(b) : " ";
  }
  const match = META_CHARSET.exec(ascii);
  return match ? match[1]!.toLowerCase() : null;
}

/** Decode page bytes using the declared charset (UTF-8 when undeclared). */
export function decodeHtml(bytes: Uint8Array): string {
  const charset = sniffCharset(bytes) ?? "utf-8";
  let decoder: TextDecoder;
  try {
    decoder = new TextDecoder(charset, { fatal: false });
  } catch {
    throw new Error(`page declares an unsupported charset: ${charset}`);
  }
  return decoder.decode(bytes);
}
