/** Render evidence text with the quantity surface wrapped in <mark>. */
export function highlightEvidence(
  doc: Document,
  evidence: string,
  surface: string,
): DocumentFragment {
  const fragment = doc.createDocumentFragment();
  const at = surface ? evidence.indexOf(surface) : -1;
  if (at < 0) {
    fragment.appendChild(doc.createTextNode(evidence));
    return fragment;
  }
  fragment.appendChild(doc.createTextNode(evidence.slice(0, at)));
  const mark = doc.createElement("mark");
  mark.textContent = surface;
  fragment.appendChild(mark);
  fragment.appendChild(doc.createTextNode(evidence.slice(at + surface.length)));
  return fragment;
}
