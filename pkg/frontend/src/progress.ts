// Live progress extracted from the client's own answered queries.
//
// Nothing here evaluates gambles; completed grid points fall out of the
// bisection structure itself. A "certain amount vs. prize gamble" query
// narrows a money bracket; when the procedure moves on to the next prize
// event (or the session ends), the previous bracket's midpoint is that grid
// point's measured indifference amount. Under the standard session setup
// (uniform tickets, linear utility between the two prizes) the point's
// probability is the prize event's ticket share and its decision weight is
// the normalized midpoint.

import type { Answer, GambleJson, QueryPayload } from "./api.js";
import { atomCount } from "./view.js";

export interface LivePoint {
  prob: number;
  weight: number;
}

interface Tracked {
  key: string;
  prob: number;
  lo: number;
  hi: number;
  worst: number;
  best: number;
  settled: boolean;
}

function moneyOf(gamble: GambleJson): number | null {
  const branch = gamble.branches[0];
  return gamble.branches.length === 1 && branch.outcome.money !== undefined
    ? branch.outcome.money
    : null;
}

function prizeStructure(gamble: GambleJson) {
  if (gamble.branches.length !== 2) return null;
  const [first, second] = gamble.branches;
  if (first.outcome.money === undefined || second.outcome.money === undefined) return null;
  const best = Math.max(first.outcome.money, second.outcome.money);
  const worst = Math.min(first.outcome.money, second.outcome.money);
  const prizeBranch = first.outcome.money >= second.outcome.money ? first : second;
  return { best, worst, prizeBranch };
}

export class GridProgress {
  private current: Tracked | null = null;
  readonly points: LivePoint[] = [];

  /** Feed an answered query; returns a newly completed point, if any. */
  record(query: QueryPayload, answer: Answer): LivePoint | null {
    const certain = moneyOf(query.left);
    const prize = prizeStructure(query.right);
    if (certain === null || prize === null) return null; // fairness checks etc.

    const key = prize.prizeBranch.event.join(",");
    let completed: LivePoint | null = null;
    if (!this.current || this.current.key !== key) {
      completed = this.flush();
      this.current = {
        key,
        prob: prize.prizeBranch.event.length / atomCount(query.right),
        lo: prize.worst,
        hi: prize.best,
        worst: prize.worst,
        best: prize.best,
        settled: false,
      };
    }
    const t = this.current;
    if (answer === "indifferent") {
      t.lo = t.hi = certain;
      t.settled = true;
    } else if (answer === "left" && certain < t.hi && certain >= t.lo) {
      t.hi = certain; // the certain amount was already enough
    } else if (answer === "right" && certain > t.lo && certain <= t.hi) {
      t.lo = certain; // the gamble still beat this amount
    }
    return completed;
  }

  /** Finish the in-flight point (call when the session reports done). */
  flush(): LivePoint | null {
    const t = this.current;
    this.current = null;
    if (!t || t.best === t.worst) return null;
    const mid = (t.lo + t.hi) / 2;
    const point = { prob: t.prob, weight: (mid - t.worst) / (t.best - t.worst) };
    this.points.push(point);
    return point;
  }
}

export interface LiveBracket {
  lo: number;
  hi: number;
}

/** Bracket progress for the squeeze procedure (event vs. lottery queries). */
export class SqueezeProgress {
  readonly bracket: LiveBracket = { lo: 0, hi: 1 };

  record(query: QueryPayload, answer: Answer): LiveBracket {
    const prize = prizeStructure(query.right);
    if (prize === null || query.left.branches.length !== 2) return this.bracket;
    const share = prize.prizeBranch.event.length / atomCount(query.right);
    if (answer === "indifferent") {
      this.bracket.lo = this.bracket.hi = share;
    } else if (answer === "left") {
      this.bracket.lo = Math.max(this.bracket.lo, share);
    } else {
      this.bracket.hi = Math.min(this.bracket.hi, share);
    }
    return this.bracket;
  }
}
