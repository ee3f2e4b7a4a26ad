// Risk-curve chart: pure geometry plus a thin canvas painter.

import type { RiskCurveJson, SampleJson } from "./api.js";

export interface ChartGeometry {
  /** Pixel polyline for the measured curve. */
  path: [number, number][];
  /** Pixel positions of the sample points. */
  points: [number, number][];
  /** Pixel polyline of the identity diagonal, for reference. */
  diagonal: [number, number][];
}

export interface Frame {
  width: number;
  height: number;
  pad: number;
}

export function toPixel(q: number, w: number, frame: Frame): [number, number] {
  const usableW = frame.width - 2 * frame.pad;
  const usableH = frame.height - 2 * frame.pad;
  return [frame.pad + q * usableW, frame.height - frame.pad - w * usableH];
}

export function chartGeometry(
  knots: [number, number][],
  samples: [number, number][],
  frame: Frame,
): ChartGeometry {
  return {
    path: knots.map(([q, w]) => toPixel(q, w, frame)),
    points: samples.map(([q, w]) => toPixel(q, w, frame)),
    diagonal: [toPixel(0, 0, frame), toPixel(1, 1, frame)],
  };
}

export function samplePairs(samples: SampleJson[]): [number, number][] {
  return samples.map((s) => [s.prob_float, s.weight]);
}

export function drawRiskChart(
  canvas: HTMLCanvasElement,
  curve: RiskCurveJson | undefined,
  samples: [number, number][],
): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const frame: Frame = { width: canvas.width, height: canvas.height, pad: 28 };
  const knots = curve ? curve.knots : samples;
  const geo = chartGeometry(knots, samples, frame);

  ctx.clearRect(0, 0, frame.width, frame.height);
  ctx.strokeStyle = "#d0d4dc";
  ctx.lineWidth = 1;
  ctx.strokeRect(frame.pad, frame.pad, frame.width - 2 * frame.pad, frame.height - 2 * frame.pad);

  ctx.beginPath();
  ctx.setLineDash([4, 4]);
  ctx.moveTo(...geo.diagonal[0]);
  ctx.lineTo(...geo.diagonal[1]);
  ctx.strokeStyle = "#b9bfc9";
  ctx.stroke();
  ctx.setLineDash([]);

  if (geo.path.length > 1) {
    ctx.beginPath();
    ctx.moveTo(...geo.path[0]);
    for (const [x, y] of geo.path.slice(1)) ctx.lineTo(x, y);
    ctx.strokeStyle = "#2c6fb3";
    ctx.lineWidth = 2;
    ctx.stroke();
  }

  ctx.fillStyle = "#c2452d";
  for (const [x, y] of geo.points) {
    ctx.beginPath();
    ctx.arc(x, y, 3.5, 0, 2 * Math.PI);
    ctx.fill();
  }

  ctx.fillStyle = "#47505e";
  ctx.font = "12px system-ui, sans-serif";
  ctx.fillText("probability", frame.width / 2 - 30, frame.height - 6);
  ctx.save();
  ctx.translate(10, frame.height / 2 + 40);
  ctx.rotate(-Math.PI / 2);
  ctx.fillText("decision weight", 0, 0);
  ctx.restore();
}

export function bracketLabel(lo: number, hi: number): string {
  return `[${lo.toFixed(6)}, ${hi.toFixed(6)}] (width ${(hi - lo).toExponential(2)})`;
}
