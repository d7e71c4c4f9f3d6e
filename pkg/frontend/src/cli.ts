#!/usr/bin/env node
/** Command line entry: render simulator outputs to SVG figures. */

import { pathToFileURL } from "node:url";

import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { FIGURE_KINDS, FigureKind } from "./figures.js";
import { renderFigure } from "./render.js";
import { SchemaError } from "./schema.js";

export async function main(argv: string[]): Promise<number> {
  let exitCode = 0;
  const parser = yargs(argv)
    .scriptName("plotkit")
    .command(
      "render",
      "render one figure from results/profile files",
      (y) =>
        y
          .option("kind", {
            choices: FIGURE_KINDS as unknown as FigureKind[],
            demandOption: true,
            describe: "figure kind to render",
          })
          .option("in", {
            type: "string",
            describe: "campaign results file (CSV or JSON)",
          })
          .option("profile", {
            type: "string",
            array: true,
            describe: "profile JSON file(s)",
          })
          .option("out", {
            type: "string",
            demandOption: true,
            describe: "output SVG path",
          })
          .option("labels", {
            type: "string",
            describe: "comma-separated legend labels for e1_cdf",
          })
          .option("width", { type: "number", default: 720 })
          .option("height", { type: "number", default: 540 }),
      (args) => {
        const written = renderFigure({
          kind: args.kind as FigureKind,
          resultsPath: args.in,
          profilePaths: args.profile,
          outPath: args.out,
          labels: args.labels ? args.labels.split(",").map((s) => s.trim()) : undefined,
          width: args.width,
          height: args.height,
        });
        console.log(written);
      },
    )
    .demandCommand(1, "pick a command")
    .strict()
    .fail((msg, err) => {
      if (err) {
        console.error(`error: ${err.message}`);
        exitCode = classify(err);
      } else {
        console.error(msg);
        exitCode = 2;
      }
    })
    .exitProcess(false);
  try {
    await parser.parseAsync();
  } catch (err) {
    if (exitCode === 0) {
      console.error(`error: ${(err as Error).message}`);
      exitCode = classify(err as Error);
    }
  }
  return exitCode;
}

/** bad inputs and bad usage exit 2, environment trouble exits 1 */
function classify(err: Error): number {
  if (err instanceof SchemaError) {
    return 2;
  }
  if ((err as NodeJS.ErrnoException).code === "ENOENT") {
    return 2;
  }
  return 1;
}

const entry = process.argv[1];
if (entry !== undefined && import.meta.url === pathToFileURL(entry).href) {
  main(hideBin(process.argv)).then((code) => {
    process.exitCode = code;
  });
}
