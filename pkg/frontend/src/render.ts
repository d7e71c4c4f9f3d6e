/**
 * Server-side SVG rendering via the echarts SSR pipeline.
 *
 * One chart instance per figure, disposed after use.  Output is a plain
 * SVG string written to disk; rendering the same inputs in a fresh
 * process yields byte-identical files (animation is disabled and no
 * time- or randomness-dependent options are used).
 */

import { readFileSync, writeFileSync, mkdirSync } from "node:fs";
import { dirname } from "node:path";

import { BarChart, LineChart } from "echarts/charts";
import { GridComponent, LegendComponent, TitleComponent } from "echarts/components";
import * as echarts from "echarts/core";
import { SVGRenderer } from "echarts/renderers";

import {
  ChartOption,
  FIGURE_KINDS,
  FigureKind,
  complexityOption,
  e1CdfOption,
  ferOption,
  orderDistOption,
} from "./figures.js";
import { ProfileDoc, ResultRow, SchemaError, parseProfile, parseResults } from "./schema.js";

echarts.use([LineChart, BarChart, GridComponent, LegendComponent, TitleComponent, SVGRenderer]);

export interface RenderSpec {
  kind: FigureKind;
  /** campaign results file (CSV or JSON); required for fer/complexity */
  resultsPath?: string;
  /** profile JSON files; required for order_dist/e1_cdf */
  profilePaths?: string[];
  outPath: string;
  labels?: string[];
  width?: number;
  height?: number;
}

export function optionForKind(
  kind: FigureKind,
  rows: ResultRow[],
  profiles: ProfileDoc[],
  labels?: string[],
): ChartOption {
  switch (kind) {
    case "fer":
      return ferOption(rows);
    case "complexity":
      return complexityOption(rows);
    case "order_dist":
      if (profiles.length === 0) {
        throw new SchemaError("order_dist needs a profile");
      }
      return orderDistOption(profiles[0]!);
    case "e1_cdf":
      return e1CdfOption(profiles, labels);
    default: {
      const never: never = kind;
      throw new SchemaError(`unknown figure kind ${String(never)}`);
    }
  }
}

export function renderOptionToSvg(option: ChartOption, width = 720, height = 540): string {
  const chart = echarts.init(null, null, {
    renderer: "svg",
    ssr: true,
    width,
    height,
  });
  try {
    chart.setOption(option);
    return chart.renderToSVGString();
  } finally {
    chart.dispose();
  }
}

function readText(path: string): string {
  try {
    return readFileSync(path, "utf8");
  } catch (err) {
    const wrapped = new Error(`cannot read ${path}: ${(err as Error).message}`);
    // keep the errno code so callers can tell "missing input" from "bad input"
    (wrapped as NodeJS.ErrnoException).code = (err as NodeJS.ErrnoException).code;
    throw wrapped;
  }
}

/** Render one figure to an SVG file and return the written path. */
export function renderFigure(spec: RenderSpec): string {
  if (!FIGURE_KINDS.includes(spec.kind)) {
    throw new SchemaError(`unknown figure kind "${spec.kind}", pick from ${FIGURE_KINDS.join(", ")}`);
  }
  const needsResults = spec.kind === "fer" || spec.kind === "complexity";
  if (needsResults && !spec.resultsPath) {
    throw new SchemaError(`figure kind "${spec.kind}" needs a results file`);
  }
  if (!needsResults && (!spec.profilePaths || spec.profilePaths.length === 0)) {
    throw new SchemaError(`figure kind "${spec.kind}" needs at least one profile file`);
  }
  const rows = spec.resultsPath ? parseResults(readText(spec.resultsPath)) : [];
  const profiles = (spec.profilePaths ?? []).map((p) => parseProfile(readText(p)));
  const option = optionForKind(spec.kind, rows, profiles, spec.labels);
  const svg = renderOptionToSvg(option, spec.width, spec.height);
  mkdirSync(dirname(spec.outPath), { recursive: true });
  writeFileSync(spec.outPath, svg, "utf8");
  return spec.outPath;
}
