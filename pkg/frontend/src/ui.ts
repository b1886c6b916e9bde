/** Small shared DOM helpers. */

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function clear(container: HTMLElement): void {
  container.replaceChildren();
}

/** API failure presentation: an error banner, and a stale-data badge
 * when the view keeps showing previously fetched content. */
export function errorBanner(container: HTMLElement, message: string, hasStaleData: boolean): void {
  const banner = el("div", "error-banner", message);
  banner.setAttribute("role", "alert");
  container.prepend(banner);
  if (hasStaleData) {
    container.prepend(el("span", "stale-badge", "stale data"));
  }
}
