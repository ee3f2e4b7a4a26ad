// Pure view-model helpers: everything here derives from the wire payload.

import type { Answer, BranchJson, GambleJson } from "./api.js";

export function formatMoney(amount: number): string {
  const sign = amount < 0 ? "-" : "";
  return `${sign}$${Math.abs(amount).toFixed(2)}`;
}

export function formatOutcome(outcome: BranchJson["outcome"]): string {
  if (outcome.money !== undefined) return formatMoney(outcome.money);
  return outcome.label ?? "?";
}

/** Contiguous runs of 1-based ticket numbers: [0,1,2,6] -> "1-3, 7". */
export function ticketRanges(indices: number[]): string {
  const sorted = [...indices].sort((a, b) => a - b);
  const parts: string[] = [];
  let start = sorted[0];
  let prev = sorted[0];
  for (const index of sorted.slice(1).concat([Number.NaN])) {
    if (index === prev + 1) {
      prev = index;
      continue;
    }
    parts.push(start === prev ? `${start + 1}` : `${start + 1}-${prev + 1}`);
    start = prev = index;
  }
  return parts.join(", ");
}

/** Total atom count of a gamble: branch events partition the space. */
export function atomCount(gamble: GambleJson): number {
  return gamble.branches.reduce((acc, branch) => acc + branch.event.length, 0);
}

export function describeEvent(indices: number[], total: number): string {
  if (indices.length === 0) return "never";
  if (indices.length === total) return "no matter what";
  const noun = indices.length === 1 ? "ticket" : "tickets";
  return `if ${noun} ${ticketRanges(indices)} (of ${total})`;
}

export interface BranchView {
  prize: string;
  condition: string;
  share: number; // fraction of tickets, for the bar visualization
}

export interface GambleCard {
  title: string;
  certain: boolean;
  branches: BranchView[];
}

export function gambleCard(gamble: GambleJson, title: string): GambleCard {
  const total = atomCount(gamble);
  if (gamble.branches.length === 1) {
    return {
      title,
      certain: true,
      branches: [
        {
          prize: formatOutcome(gamble.branches[0].outcome),
          condition: "for sure",
          share: 1,
        },
      ],
    };
  }
  const branches = gamble.branches
    .filter((branch) => branch.event.length > 0)
    .map((branch) => ({
      prize: formatOutcome(branch.outcome),
      condition: describeEvent(branch.event, total),
      share: branch.event.length / total,
    }));
  return { title, certain: false, branches };
}

/** Keyboard access: left/right arrows pick a side, space is "can't decide". */
export function keyToAnswer(key: string): Answer | null {
  switch (key) {
    case "ArrowLeft":
      return "left";
    case "ArrowRight":
      return "right";
    case " ":
    case "Spacebar":
      return "indifferent";
    default:
      return null;
  }
}
