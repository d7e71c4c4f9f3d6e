/**
 * Chart option builders.
 *
 * Each builder is a pure function from parsed inputs to an echarts option
 * object, so tests can inspect series data without touching a renderer.
 * Series grouping and labels follow the simulator's own report figures:
 * one series per (decoder, P, tmax) operating family, FER on a log axis.
 */

import type { BarSeriesOption, LineSeriesOption } from "echarts/charts";
import type {
  GridComponentOption,
  LegendComponentOption,
  TitleComponentOption,
} from "echarts/components";
import type { ComposeOption } from "echarts/core";

import { ProfileDoc, ResultRow, SchemaError } from "./schema.js";

export type ChartOption = ComposeOption<
  | LineSeriesOption
  | BarSeriesOption
  | GridComponentOption
  | LegendComponentOption
  | TitleComponentOption
>;
type CurveSeriesOption = LineSeriesOption;

export const FIGURE_KINDS = ["fer", "complexity", "order_dist", "e1_cdf"] as const;
export type FigureKind = (typeof FIGURE_KINDS)[number];

export function seriesLabel(row: ResultRow): string {
  let label = row.decoder;
  if (row.decoder === "pscf") {
    label += ` P=${row.P}`;
  }
  if (row.decoder === "scflip" || row.decoder === "pscf") {
    label += ` t=${row.tmax}`;
  }
  return label;
}

export interface CurveSeries {
  label: string;
  points: Array<[number, number]>;
}

/** Group rows into per-decoder curves sorted by SNR, insertion-ordered by label. */
export function groupCurves(rows: ResultRow[], value: "fer" | "avg_norm_complexity"): CurveSeries[] {
  const groups = new Map<string, ResultRow[]>();
  for (const row of rows) {
    const label = seriesLabel(row);
    const bucket = groups.get(label);
    if (bucket) {
      bucket.push(row);
    } else {
      groups.set(label, [row]);
    }
  }
  const curves: CurveSeries[] = [];
  for (const [label, bucket] of groups) {
    bucket.sort((a, b) => a.ebn0_db - b.ebn0_db);
    curves.push({ label, points: bucket.map((r) => [r.ebn0_db, r[value]]) });
  }
  return curves;
}

const BASE_GRID = { left: 70, right: 20, top: 40, bottom: 55 } as const;

function curveOption(curves: CurveSeries[], yName: string, logY: boolean): ChartOption {
  if (curves.length === 0) {
    throw new SchemaError("no result rows to plot");
  }
  const series: CurveSeriesOption[] = curves.map((curve) => ({
    name: curve.label,
    type: "line",
    data: curve.points,
    symbol: "circle",
    symbolSize: 6,
  }));
  return {
    animation: false,
    grid: { ...BASE_GRID },
    legend: { top: 8, data: curves.map((c) => c.label) },
    xAxis: {
      type: "value",
      name: "Eb/N0 (dB)",
      nameLocation: "middle",
      nameGap: 30,
      scale: true,
    },
    yAxis: {
      type: logY ? "log" : "value",
      name: yName,
      nameLocation: "middle",
      nameGap: 55,
    },
    series,
  };
}

export function ferOption(rows: ResultRow[]): ChartOption {
  return curveOption(groupCurves(rows, "fer"), "FER", true);
}

export function complexityOption(rows: ResultRow[]): ChartOption {
  return curveOption(groupCurves(rows, "avg_norm_complexity"), "normalized average complexity", false);
}

/** Failure share by error order, orders 1..max with trailing zeros dropped. */
export function orderShares(profile: ProfileDoc): Array<{ order: number; share: number }> {
  if (profile.failures <= 0) {
    throw new SchemaError("profile holds no failures to plot");
  }
  const tallies = profile.order_tallies;
  let last = tallies.length - 1;
  while (last > 1 && tallies[last] === 0) {
    last -= 1;
  }
  const shares: Array<{ order: number; share: number }> = [];
  for (let order = 1; order <= last; order++) {
    shares.push({ order, share: tallies[order]! / profile.failures });
  }
  return shares;
}

export function orderDistOption(profile: ProfileDoc): ChartOption {
  const shares = orderShares(profile);
  return {
    animation: false,
    grid: { ...BASE_GRID },
    title: {
      text: `${profile.failures} failures at ${profile.ebn0_db} dB`,
      left: "center",
      textStyle: { fontSize: 13 },
    },
    xAxis: {
      type: "category",
      name: "error order",
      nameLocation: "middle",
      nameGap: 30,
      data: shares.map((s) => `E${s.order}`),
    },
    yAxis: {
      type: "value",
      name: "share of failed frames",
      nameLocation: "middle",
      nameGap: 55,
    },
    series: [
      {
        type: "bar",
        data: shares.map((s) => s.share),
        barWidth: "80%",
      },
    ],
  };
}

/** Cumulative first-error distribution over leaf indices; ends at 1. */
export function e1Cdf(profile: ProfileDoc): number[] {
  const total = profile.e1_histogram.reduce((a, b) => a + b, 0);
  if (total <= 0) {
    throw new SchemaError("profile e1_histogram is all zero");
  }
  const cdf: number[] = new Array(profile.e1_histogram.length);
  let running = 0;
  for (let i = 0; i < profile.e1_histogram.length; i++) {
    running += profile.e1_histogram[i]!;
    cdf[i] = running / total;
  }
  return cdf;
}

export function e1CdfOption(profiles: ProfileDoc[], labels?: string[]): ChartOption {
  if (profiles.length === 0) {
    throw new SchemaError("no profiles to plot");
  }
  const series: CurveSeriesOption[] = profiles.map((profile, k) => {
    const label = labels?.[k] ?? `${profile.ebn0_db} dB`;
    return {
      name: label,
      type: "line",
      data: e1Cdf(profile).map((v, i) => [i, v] as [number, number]),
      symbol: "none",
    };
  });
  return {
    animation: false,
    grid: { ...BASE_GRID },
    legend: { top: 8, data: series.map((s) => s.name as string) },
    xAxis: {
      type: "value",
      name: "bit-channel index",
      nameLocation: "middle",
      nameGap: 30,
      max: profiles[0]!.e1_histogram.length - 1,
    },
    yAxis: {
      type: "value",
      name: "cumulative share of first errors",
      nameLocation: "middle",
      nameGap: 55,
      min: 0,
      max: 1.02,
    },
    series,
  };
}
