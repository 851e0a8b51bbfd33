/** DOM rendering. Pure functions from wire data to elements; all event
 * behavior is passed in as callbacks. The result list is rendered exactly
 * in the service's cluster order - the UI never re-ranks. */

import type {
  FacetFilter,
  MemberSummary,
  ResultPageWire,
  WireCluster,
  WireDescription,
} from "./types.js";

export interface RenderCallbacks {
  onResultClick: (recordId: string, position: number) => void;
  onFacetToggle: (dimension: string, value: string) => void;
  onSuggestion: (query: string) => void;
}

const FACET_LABELS: Record<string, string> = {
  document_type: "Type",
  subject_heading: "Subject",
  publication_year: "Year",
  language: "Language",
  availability: "Availability",
};

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

/** Snippet paragraph with one <mark> per highlight span.
 *
 * The description text is "static line\nsnippet" with spans addressing the
 * full text; only the snippet is rendered here (the header already shows
 * the static fields), so spans are shifted by the snippet offset. */
export function renderSnippet(
  doc: Document,
  description: WireDescription,
): HTMLElement | null {
  const newline = description.text.indexOf("\n");
  if (newline < 0) return null;
  const snippet = description.text.slice(newline + 1);
  const offset = newline + 1;
  const p = el(doc, "p", "snippet");
  let cursor = 0;
  for (const [start, end] of description.spans) {
    const s = start - offset;
    const e = end - offset;
    if (s < 0 || e > snippet.length || s < cursor) continue;
    if (s > cursor) {
      p.appendChild(doc.createTextNode(snippet.slice(cursor, s)));
    }
    const mark = el(doc, "mark", undefined, snippet.slice(s, e));
    p.appendChild(mark);
    cursor = e;
  }
  if (cursor < snippet.length) {
    p.appendChild(doc.createTextNode(snippet.slice(cursor)));
  }
  return p;
}

function memberLine(doc: Document, member: MemberSummary): string {
  const authors = member.authors?.length ? member.authors.join("; ") : "—";
  return `${member.title ?? member.record_id} / ${authors} (${member.publication_year ?? "?"})`;
}

function renderCluster(
  doc: Document,
  cluster: WireCluster,
  descriptions: Record<string, WireDescription>,
  callbacks: RenderCallbacks,
): HTMLElement {
  const rep =
    cluster.members.find((m) => m.record_id === cluster.representative) ??
    cluster.members[0];
  const article = el(doc, "article", "result");
  article.dataset.recordId = cluster.representative;
  article.dataset.position = String(cluster.position);

  const header = el(doc, "header");
  const title = el(doc, "a", "result-title", rep?.title ?? cluster.representative);
  title.setAttribute("href", `#record/${cluster.representative}`);
  title.addEventListener("click", () => {
    callbacks.onResultClick(cluster.representative, cluster.position);
  });
  header.appendChild(title);
  if (rep?.subtitle) {
    header.appendChild(el(doc, "span", "result-subtitle", rep.subtitle));
  }
  article.appendChild(header);

  const meta = el(doc, "div", "result-meta");
  const authors = rep?.authors?.length ? rep.authors.join("; ") : "—";
  meta.appendChild(el(doc, "span", "authors", authors));
  meta.appendChild(el(doc, "span", "badge year", String(rep?.publication_year ?? "?")));
  meta.appendChild(el(doc, "span", "badge type", rep?.document_type ?? "?"));
  meta.appendChild(el(doc, "span", "badge availability", rep?.availability ?? "?"));
  meta.appendChild(el(doc, "span", "score", cluster.score.toFixed(4)));
  article.appendChild(meta);

  const description = descriptions[cluster.representative];
  if (description) {
    const snippet = renderSnippet(doc, description);
    if (snippet) article.appendChild(snippet);
  }

  if (cluster.members.length > 1) {
    const versions = el(doc, "details", "versions");
    versions.appendChild(
      el(doc, "summary", undefined, `${cluster.members.length} versions`),
    );
    const list = el(doc, "ul");
    for (const member of cluster.members) {
      if (member.record_id === cluster.representative) continue;
      const item = el(doc, "li", "version", memberLine(doc, member));
      item.dataset.recordId = member.record_id;
      list.appendChild(item);
    }
    versions.appendChild(list);
    article.appendChild(versions);
  }
  return article;
}

export function renderResults(
  container: HTMLElement,
  page: ResultPageWire,
  callbacks: RenderCallbacks,
): void {
  const doc = container.ownerDocument;
  container.innerHTML = "";

  const status = el(
    doc,
    "p",
    "status",
    `${page.total_results} results in ${page.total_clusters} clusters · ` +
      `intent: ${page.intent.kind} (${page.intent.confidence.toFixed(2)})`,
  );
  status.dataset.intent = page.intent.kind;
  container.appendChild(status);

  if (page.zero_result) {
    container.appendChild(el(doc, "p", "zero-result", "No results."));
    if (page.suggestions.length) {
      const row = el(doc, "div", "suggestions");
      row.appendChild(el(doc, "span", undefined, "Try: "));
      for (const suggestion of page.suggestions) {
        const chip = el(doc, "button", "suggestion-chip", suggestion);
        chip.addEventListener("click", () => callbacks.onSuggestion(suggestion));
        row.appendChild(chip);
      }
      container.appendChild(row);
    }
    return;
  }

  const list = el(doc, "div", "result-list");
  for (const cluster of page.clusters) {
    list.appendChild(renderCluster(doc, cluster, page.descriptions, callbacks));
  }
  container.appendChild(list);
}

export function renderFacets(
  container: HTMLElement,
  page: ResultPageWire,
  active: FacetFilter[],
  callbacks: RenderCallbacks,
): void {
  const doc = container.ownerDocument;
  container.innerHTML = "";
  const activeKeys = new Set(active.map((f) => `${f.dimension}:${f.value}`));
  for (const [dimension, values] of Object.entries(page.facets)) {
    if (!values.length) continue;
    const section = el(doc, "section", "facet-dimension");
    section.dataset.dimension = dimension;
    section.appendChild(
      el(doc, "h3", undefined, FACET_LABELS[dimension] ?? dimension),
    );
    const list = el(doc, "ul");
    for (const [value, count] of values) {
      const item = el(doc, "li");
      const button = el(doc, "button", "facet-value", `${value} (${count})`);
      button.dataset.dimension = dimension;
      button.dataset.value = value;
      button.dataset.count = String(count);
      if (activeKeys.has(`${dimension}:${value}`)) {
        button.classList.add("active");
      }
      button.addEventListener("click", () =>
        callbacks.onFacetToggle(dimension, value),
      );
      item.appendChild(button);
      list.appendChild(item);
    }
    section.appendChild(list);
    container.appendChild(section);
  }
}

export function renderError(container: HTMLElement, message: string): void {
  const doc = container.ownerDocument;
  let banner = container.querySelector<HTMLElement>(".error-banner");
  if (!banner) {
    banner = el(doc, "div", "error-banner");
    container.prepend(banner);
  }
  banner.textContent = message;
  banner.style.display = "block";
}

export function clearError(container: HTMLElement): void {
  const banner = container.querySelector<HTMLElement>(".error-banner");
  if (banner) banner.style.display = "none";
}
