/** Explainability view: per attacked sample, the class-pair neuron ranking
 * (neuron, F_c, F_c', |difference|, sorted by the server) and one line
 * chart per monitored neuron across attack steps. */

import { lineChart } from "../charts.js";
import { el } from "../dom.js";
import { showNumber } from "../format.js";
import type { ExplainSamplePayload, RunRecord } from "../types.js";

function rankingTable(sample: ExplainSamplePayload): HTMLTableElement {
  const [a, b] = sample.class_pair;
  const table = el("table", { class: "ranking-table" });
  table.append(
    el("tr", {}, [
      el("th", {}, ["neuron"]),
      el("th", {}, [`F${a}`]),
      el("th", {}, [`F${b}`]),
      el("th", {}, [`|F${a} - F${b}|`]),
    ]),
  );
  for (const row of sample.ranking) {
    table.append(
      el("tr", { class: "ranking-row" }, [
        el("td", { "data-metric": "neuron" }, [String(row.neuron)]),
        el("td", { "data-metric": "freq_a" }, [showNumber(row.freq_a)]),
        el("td", { "data-metric": "freq_b" }, [showNumber(row.freq_b)]),
        el("td", { "data-metric": "difference" }, [showNumber(row.difference)]),
      ]),
    );
  }
  return table;
}

function traceCharts(sample: ExplainSamplePayload): HTMLElement {
  const wrap = el("div", { class: "trace-charts" });
  sample.monitor.neurons.forEach((neuron, i) => {
    const chart = lineChart(sample.monitor.values[i], {
      title: `neuron ${neuron}`,
    });
    const cell = el("figure", { class: "trace-cell", "data-neuron": String(neuron) });
    cell.append(chart);
    cell.append(
      el("figcaption", {}, [
        `activation over steps 0…${sample.monitor.values[i].length - 1}`,
      ]),
    );
    wrap.append(cell);
  });
  return wrap;
}

export function renderExplainView(container: HTMLElement, record: RunRecord): void {
  container.replaceChildren();
  const explain = record.explain;
  container.append(el("h2", {}, ["Explainability"]));
  container.append(
    el("p", { class: "explain-meta" }, [
      `layer ${explain.layer_index}, tau ${showNumber(explain.tau)}, ` +
        `top k = ${explain.k}; class sample counts: ` +
        explain.class_counts.join(", "),
    ]),
  );
  for (const sample of explain.samples) {
    const [a, b] = sample.class_pair;
    const section = el("section", {
      class: "explain-sample",
      "data-sample": String(sample.index),
    });
    section.append(
      el("h3", {}, [`sample #${sample.index}: class ${a} → ${b}`]),
    );
    section.append(
      el("p", { class: "state-predictions" }, [
        `predictions per step: ${sample.monitor.predictions.join(" → ")}`,
      ]),
    );
    section.append(rankingTable(sample));
    section.append(traceCharts(sample));
    container.append(section);
  }
}
