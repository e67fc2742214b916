import { highlightEvidence } from "./highlight.js";
import type { MethodInfo, SearchHit } from "./types.js";

/** Static page skeleton; the app fills the dynamic regions. */
export function renderShell(root: HTMLElement): void {
  root.innerHTML = `
    <header class="topbar">
      <h1>quantsearch</h1>
      <form id="search-form">
        <input id="query-input" type="text" placeholder="e.g. 2020 operating income of Hengtai Industrial" autocomplete="off" />
        <select id="method-select"></select>
        <input id="k-input" type="number" min="1" max="100" value="10" />
        <button type="submit">Search</button>
      </form>
    </header>
    <div id="banner" class="banner" hidden>
      <span id="banner-text"></span>
      <button id="banner-dismiss" type="button">&times;</button>
    </div>
    <main id="results" aria-live="polite"></main>
  `;
}

export function renderMethods(
  select: HTMLSelectElement,
  methods: MethodInfo[],
  selected: string,
): void {
  select.innerHTML = "";
  for (const m of methods) {
    const option = select.ownerDocument.createElement("option");
    option.value = m.name;
    option.textContent = m.available ? m.name : `${m.name} (unavailable)`;
    option.disabled = !m.available;
    select.appendChild(option);
  }
  const usable = methods.some((m) => m.name === selected && m.available);
  if (usable) {
    select.value = selected;
  } else {
    const first = methods.find((m) => m.available);
    if (first) {
      select.value = first.name;
    }
  }
}

/** Result cards in exactly the order the server returned them. */
export function renderHits(
  container: HTMLElement,
  hits: SearchHit[],
  onRefine: (description: string) => void,
): void {
  const doc = container.ownerDocument;
  container.innerHTML = "";
  if (hits.length === 0) {
    const empty = doc.createElement("p");
    empty.className = "empty-state";
    empty.textContent = "No results. Try fewer or different terms.";
    container.appendChild(empty);
    return;
  }
  hits.forEach((hit, i) => {
    const card = doc.createElement("article");
    card.className = i === 0 ? "hit top-hit" : "hit";
    card.dataset.recordId = hit.record_id;

    const value = doc.createElement("div");
    value.className = "hit-value";
    value.textContent = hit.value;
    card.appendChild(value);

    const description = doc.createElement("a");
    description.className = "hit-description";
    description.href = "#";
    description.textContent = hit.description;
    description.title = "Use this description as the query";
    description.addEventListener("click", (event) => {
      event.preventDefault();
      onRefine(hit.description);
    });
    card.appendChild(description);

    const evidence = doc.createElement("p");
    evidence.className = "hit-evidence";
    evidence.appendChild(highlightEvidence(doc, hit.evidence, hit.surface));
    card.appendChild(evidence);

    const meta = doc.createElement("footer");
    meta.className = "hit-meta";
    meta.textContent =
      `#${hit.rank}  score ${hit.score.toFixed(4)}  ` +
      `${hit.doc_id} sentence ${hit.sentence_id}`;
    card.appendChild(meta);

    container.appendChild(card);
  });
}

export function renderLoading(container: HTMLElement): void {
  container.innerHTML = '<p class="loading">Searching…</p>';
}

export function showBanner(root: HTMLElement, message: string): void {
  const banner = root.querySelector<HTMLElement>("#banner")!;
  root.querySelector<HTMLElement>("#banner-text")!.textContent = message;
  banner.hidden = false;
}

export function hideBanner(root: HTMLElement): void {
  root.querySelector<HTMLElement>("#banner")!.hidden = true;
}
