/** Impact view: original | adversarial | difference image grid plus the
 * six-metric table (original accuracy, adversarial accuracy, similarity
 * average/maximum/minimum, grade). Every number comes verbatim from the
 * run record. */

import { el } from "../dom.js";
import { showNumber } from "../format.js";
import { imageSvg } from "../images.js";
import type { ImpactReportPayload, RunRecord } from "../types.js";
import { isDefenseReport } from "../types.js";

const METRIC_ROWS: Array<[string, keyof ImpactReportPayload]> = [
  ["Original accuracy", "original_accuracy"],
  ["Adversarial accuracy", "adversarial_accuracy"],
  ["Similarity average", "similarity_avg"],
  ["Similarity maximum", "similarity_max"],
  ["Similarity minimum", "similarity_min"],
  ["Grade", "grade"],
];

export function metricsTable(report: ImpactReportPayload, caption: string): HTMLTableElement {
  const table = el("table", { class: "metrics-table" });
  table.append(el("caption", {}, [caption]));
  for (const [label, field] of METRIC_ROWS) {
    table.append(
      el("tr", {}, [
        el("th", {}, [label]),
        el("td", { "data-metric": field }, [showNumber(report[field] as number)]),
      ]),
    );
  }
  return table;
}

function sampleGrid(report: ImpactReportPayload): HTMLTableElement {
  const grid = el("table", { class: "impact-grid" });
  grid.append(
    el("tr", {}, [
      el("th", {}, ["sample"]),
      el("th", {}, ["original"]),
      el("th", {}, ["adversarial"]),
      el("th", {}, ["difference"]),
      el("th", {}, ["labels"]),
    ]),
  );
  for (const sample of report.samples) {
    const labels = el("div", { class: "sample-labels" }, [
      el("div", {}, [`true ${sample.true_label}`]),
      el("div", { "data-metric": "original_prediction" }, [
        `predicted ${sample.original_prediction}`,
      ]),
      el("div", { "data-metric": "adversarial_prediction" }, [
        `attacked → ${sample.adversarial_prediction}`,
      ]),
      el("div", { "data-metric": "similarity" }, [
        `ssim ${showNumber(sample.similarity)}`,
      ]),
    ]);
    grid.append(
      el("tr", { class: "impact-row", "data-sample": String(sample.index) }, [
        el("td", {}, [`#${sample.index}`]),
        el("td", {}, [imageSvg(sample.original)]),
        el("td", {}, [imageSvg(sample.adversarial)]),
        el("td", {}, [imageSvg(sample.diff)]),
        el("td", {}, [labels]),
      ]),
    );
  }
  return grid;
}

export function renderImpactView(container: HTMLElement, record: RunRecord): void {
  container.replaceChildren();
  container.append(el("h2", {}, ["Impact"]));
  container.append(el("p", { class: "run-id" }, [`run ${record.run_id}`]));

  if (isDefenseReport(record.report)) {
    const report = record.report;
    container.append(el("p", {}, [`defense: ${report.kind}`]));
    container.append(metricsTable(report.baseline, "Baseline (undefended)"));
    container.append(metricsTable(report.defended, "Defended"));
    if (report.risk_scores) {
      container.append(
        el("p", { class: "gate-summary" }, [
          `flagged queries: ${showNumber(report.flag_count ?? 0)} of `,
          `${report.risk_scores.length}`,
        ]),
      );
      container.append(
        el("p", { class: "gate-risks" }, [
          `risk scores: ${report.risk_scores.map(showNumber).join(", ")}`,
        ]),
      );
    }
    container.append(sampleGrid(report.baseline));
  } else {
    container.append(metricsTable(record.report, "Attack impact"));
    container.append(sampleGrid(record.report));
  }
}
