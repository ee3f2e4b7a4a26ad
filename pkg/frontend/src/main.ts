// DOM wiring for the live elicitation client. All state beyond the session
// id lives on the server; refreshing the page re-polls the pending query.

import { SessionApi } from "./api.js";
import type { Answer, EstimateJson, QueryPayload, ResultsJson } from "./api.js";
import { drawRiskChart, bracketLabel, samplePairs } from "./chart.js";
import { SessionFlow } from "./flow.js";
import { GridProgress, SqueezeProgress } from "./progress.js";
import { gambleCard, keyToAnswer } from "./view.js";
import type { GambleCard } from "./view.js";

const SESSION_KEY = "reu-elicit-session";

const DEFAULT_CONFIGS: Record<string, object> = {
  "risk-grid": {
    atoms: 8,
    denominators: [2, 4, 8],
    epsilon: 0.01,
    best: 1.0,
    worst: 0.0,
    utility: { money: { kind: "linear" } },
  },
  "prob-squeeze": {
    atoms: 16,
    event: [0, 1, 2, 3, 4],
    schedule: [2, 4, 8, 16],
    tolerance: "1/16",
    best: 1.0,
    worst: 0.0,
  },
  "prob-inversion": {
    atoms: 2,
    event: [0],
    epsilon: 0.01,
    best: 1.0,
    worst: 0.0,
    risk: { variant: "identity" },
    utility: { money: { kind: "linear" } },
  },
};

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function renderCard(container: HTMLElement, card: GambleCard): void {
  container.innerHTML = "";
  const heading = document.createElement("h3");
  heading.textContent = card.title;
  container.appendChild(heading);
  for (const branch of card.branches) {
    const row = document.createElement("div");
    row.className = "branch";
    const bar = document.createElement("div");
    bar.className = "ticket-bar";
    bar.style.width = `${Math.round(branch.share * 100)}%`;
    const label = document.createElement("div");
    label.className = "branch-label";
    label.textContent = `${branch.prize} ${branch.condition}`;
    row.appendChild(label);
    if (!card.certain) row.appendChild(bar);
    container.appendChild(row);
  }
}

class Ui {
  private api = new SessionApi("");
  private flow: SessionFlow | null = null;
  private pendingResolve: ((answer: Answer) => void) | null = null;
  private grid = new GridProgress();
  private squeeze = new SqueezeProgress();
  private procedure = "risk-grid";

  start(): void {
    el<HTMLSelectElement>("procedure").addEventListener("change", (event) => {
      const value = (event.target as HTMLSelectElement).value;
      el<HTMLTextAreaElement>("config").value = JSON.stringify(
        DEFAULT_CONFIGS[value] ?? {},
        null,
        2,
      );
    });
    el<HTMLTextAreaElement>("config").value = JSON.stringify(
      DEFAULT_CONFIGS["risk-grid"],
      null,
      2,
    );
    el<HTMLButtonElement>("start").addEventListener("click", () => void this.create());
    for (const answer of ["left", "right", "indifferent"] as Answer[]) {
      el<HTMLButtonElement>(`answer-${answer}`).addEventListener("click", () =>
        this.submit(answer),
      );
    }
    document.addEventListener("keydown", (event) => {
      const answer = keyToAnswer(event.key);
      if (answer && this.pendingResolve) {
        event.preventDefault();
        this.submit(answer);
      }
    });
    const stored = localStorage.getItem(SESSION_KEY);
    if (stored) {
      const [procedure, sessionId] = stored.split(":", 2);
      this.procedure = procedure;
      void this.resume(sessionId);
    }
  }

  private async create(): Promise<void> {
    const procedure = el<HTMLSelectElement>("procedure").value;
    let config: unknown;
    try {
      config = JSON.parse(el<HTMLTextAreaElement>("config").value);
    } catch {
      this.status("config is not valid JSON");
      return;
    }
    try {
      const sessionId = await this.api.createSession(procedure, config);
      this.procedure = procedure;
      localStorage.setItem(SESSION_KEY, `${procedure}:${sessionId}`);
      void this.resume(sessionId);
    } catch (error) {
      this.status(`could not start: ${String(error)}`);
    }
  }

  private async resume(sessionId: string): Promise<void> {
    el("setup").classList.add("hidden");
    el("session").classList.remove("hidden");
    el<HTMLAnchorElement>("transcript-link").href = this.api.transcriptUrl(sessionId);
    this.grid = new GridProgress();
    this.squeeze = new SqueezeProgress();
    this.flow = new SessionFlow(
      this.api,
      sessionId,
      (query) => this.present(query),
      {
        onQuery: (query, answered) => {
          el("progress").textContent = `question ${query.query_id + 1} (answered ${answered})`;
        },
        onAnswered: (query, answer) => this.trackProgress(query, answer),
        onDone: (results) => this.showResults(results),
        onRetry: (attempt) => this.status(`connection lost, retrying (${attempt})...`),
      },
    );
    try {
      await this.flow.run();
    } catch (error) {
      this.status(`session failed: ${String(error)}`);
    }
  }

  private present(query: QueryPayload): Promise<Answer> {
    this.status("");
    renderCard(el("card-left"), gambleCard(query.left, "Option A"));
    renderCard(el("card-right"), gambleCard(query.right, "Option B"));
    return new Promise<Answer>((resolve) => {
      this.pendingResolve = resolve;
    });
  }

  private submit(answer: Answer): void {
    const resolve = this.pendingResolve;
    if (!resolve) return;
    this.pendingResolve = null;
    resolve(answer);
  }

  private trackProgress(query: QueryPayload, answer: Answer): void {
    if (this.procedure === "risk-grid") {
      const completed = this.grid.record(query, answer);
      if (completed) this.redrawLive();
    } else if (this.procedure === "prob-squeeze") {
      const bracket = this.squeeze.record(query, answer);
      el("live-note").textContent = `current bracket ${bracketLabel(bracket.lo, bracket.hi)}`;
    }
  }

  private redrawLive(): void {
    const canvas = el<HTMLCanvasElement>("chart");
    const points = [...this.grid.points].sort((a, b) => a.prob - b.prob);
    const pairs = points.map((p) => [p.prob, p.weight] as [number, number]);
    drawRiskChart(canvas, { knots: [[0, 0], ...pairs, [1, 1]], rule: "live" }, pairs);
    el("live-note").textContent = `${points.length} grid points measured so far`;
  }

  private showResults(results: ResultsJson): void {
    this.grid.flush();
    el("answers").classList.add("hidden");
    el("query-cards").classList.add("hidden");
    el("results").classList.remove("hidden");
    el("progress").textContent = `finished after ${results.query_count} questions`;
    if (results.risk_curve && results.samples) {
      drawRiskChart(
        el<HTMLCanvasElement>("chart"),
        results.risk_curve,
        samplePairs(results.samples),
      );
      el("live-note").textContent = `${results.samples.length} measured points`;
    }
    if (results.estimates) {
      const list = el("estimates");
      list.innerHTML = "";
      for (const estimate of results.estimates) {
        const item = document.createElement("li");
        item.textContent = describeEstimate(estimate);
        list.appendChild(item);
      }
    }
    localStorage.removeItem(SESSION_KEY);
  }

  private status(text: string): void {
    el("status").textContent = text;
  }
}

function describeEstimate(estimate: EstimateJson): string {
  const [lo, hi] = estimate.bracket_float;
  const flag = estimate.converged ? "" : " (not converged)";
  return (
    `p = ${estimate.value.toFixed(6)} via ${estimate.method}, ` +
    `bracket ${bracketLabel(lo, hi)}, ${estimate.query_count} questions${flag}`
  );
}

document.addEventListener("DOMContentLoaded", () => new Ui().start());
