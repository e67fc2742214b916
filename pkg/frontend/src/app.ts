import { SearchClient } from "./api.js";
import type { SearchHit } from "./types.js";
import { readState, writeState, type ViewState } from "./urlstate.js";
import {
  hideBanner,
  renderHits,
  renderLoading,
  renderMethods,
  renderShell,
  showBanner,
} from "./view.js";

/**
 * Controller: wires the form to the service and keeps q/method/k in the
 * URL.  One request is live at a time; responses arriving after a newer
 * request has been issued are discarded by sequence number.  The UI never
 * reorders or filters hits — display order is the server's order.
 */
export class App {
  private seq = 0;
  private state: ViewState;
  private hits: SearchHit[] = [];

  constructor(
    private root: HTMLElement,
    private client: SearchClient,
    private win: Window,
  ) {
    this.state = readState(win);
  }

  async start(): Promise<void> {
    renderShell(this.root);
    this.queryInput().value = this.state.query;
    this.kInput().value = String(this.state.k);
    try {
      const methods = await this.client.methods();
      renderMethods(this.methodSelect(), methods, this.state.method);
      this.state.method = this.methodSelect().value || this.state.method;
    } catch (err) {
      showBanner(this.root, `Could not load methods: ${messageOf(err)}`);
    }

    this.form().addEventListener("submit", (event) => {
      event.preventDefault();
      void this.submit();
    });
    this.methodSelect().addEventListener("change", () => {
      this.state.method = this.methodSelect().value;
      if (this.state.query) {
        void this.runSearch(); // same query, new method
      }
    });
    this.root
      .querySelector<HTMLElement>("#banner-dismiss")!
      .addEventListener("click", () => hideBanner(this.root));

    if (this.state.query) {
      await this.runSearch(); // restore the view encoded in the URL
    }
  }

  /** Validate the form and fire a search; empty queries never hit the network. */
  async submit(): Promise<void> {
    const query = this.queryInput().value.trim();
    if (!query) {
      showBanner(this.root, "Enter a query first.");
      return;
    }
    const k = Number.parseInt(this.kInput().value, 10);
    this.state = {
      query,
      method: this.methodSelect().value,
      k: Number.isFinite(k) && k >= 1 ? k : this.state.k,
    };
    await this.runSearch();
  }

  async runSearch(): Promise<void> {
    const mySeq = ++this.seq;
    hideBanner(this.root);
    renderLoading(this.results());
    writeState(this.win, this.state);
    try {
      const res = await this.client.search(
        this.state.query,
        this.state.method,
        this.state.k,
      );
      if (mySeq !== this.seq) {
        return; // a newer search superseded this one
      }
      this.hits = res.hits;
      renderHits(this.results(), this.hits, (description) => {
        this.queryInput().value = description;
        this.queryInput().focus();
      });
    } catch (err) {
      if (mySeq !== this.seq) {
        return;
      }
      this.results().innerHTML = "";
      showBanner(this.root, messageOf(err));
    }
  }

  currentHits(): readonly SearchHit[] {
    return this.hits;
  }

  private form(): HTMLFormElement {
    return this.root.querySelector<HTMLFormElement>("#search-form")!;
  }

  private queryInput(): HTMLInputElement {
    return this.root.querySelector<HTMLInputElement>("#query-input")!;
  }

  private kInput(): HTMLInputElement {
    return this.root.querySelector<HTMLInputElement>("#k-input")!;
  }

  private methodSelect(): HTMLSelectElement {
    return this.root.querySelector<HTMLSelectElement>("#method-select")!;
  }

  private results(): HTMLElement {
    return this.root.querySelector<HTMLElement>("#results")!;
  }
}

function messageOf(err: unknown): string {
  return err instanceof Error ? err.message : String(err);
}
