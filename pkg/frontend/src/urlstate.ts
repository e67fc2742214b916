/** View state lives in the URL so any results page is shareable. */

export interface ViewState {
  query: string;
  method: string;
  k: number;
}

export const DEFAULT_METHOD = "cq-dense-ws"; // strongest method server-side
export const DEFAULT_K = 10;

export function readState(win: Window): ViewState {
  const params = new URLSearchParams(win.location.search);
  const k = Number.parseInt(params.get("k") ?? "", 10);
  return {
    query: params.get("q") ?? "",
    method: params.get("method") ?? DEFAULT_METHOD,
    k: Number.isFinite(k) && k >= 1 ? k : DEFAULT_K,
  };
}

export function writeState(win: Window, state: ViewState): void {
  const params = new URLSearchParams();
  if (state.query) {
    params.set("q", state.query);
  }
  params.set("method", state.method);
  params.set("k", String(state.k));
  const url = `${win.location.pathname}?${params}`;
  win.history.replaceState(null, "", url);
}
