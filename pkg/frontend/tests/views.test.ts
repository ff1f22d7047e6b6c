/** All three views render the shipped golden run record without a backend,
 * and every displayed number is the payload value verbatim. */

import { beforeEach, describe, expect, it } from "vitest";

import { decodeTensor } from "../src/images.js";
import type { ImpactReportPayload, RunRecord } from "../src/types.js";
import { renderCommandControl } from "../src/views/command.js";
import { renderExplainView } from "../src/views/explain.js";
import { renderImpactView } from "../src/views/impact.js";

import goldenJson from "./golden_run.json";

const golden = goldenJson as unknown as RunRecord;
const report = golden.report as ImpactReportPayload;

function container(): HTMLElement {
  const node = document.createElement("div");
  document.body.replaceChildren(node);
  return node;
}

describe("impact view", () => {
  let root: HTMLElement;
  beforeEach(() => {
    root = container();
    renderImpactView(root, golden);
  });

  it("shows the six metrics in order, byte-for-byte from the payload", () => {
    const cells = [...root.querySelectorAll(".metrics-table td")];
    expect(cells.map((c) => c.getAttribute("data-metric"))).toEqual([
      "original_accuracy",
      "adversarial_accuracy",
      "similarity_avg",
      "similarity_max",
      "similarity_min",
      "grade",
    ]);
    expect(cells.map((c) => c.textContent)).toEqual([
      String(report.original_accuracy),
      String(report.adversarial_accuracy),
      String(report.similarity_avg),
      String(report.similarity_max),
      String(report.similarity_min),
      String(report.grade),
    ]);
  });

  it("renders one grid row per attacked sample with three images", () => {
    const rows = [...root.querySelectorAll(".impact-row")];
    expect(rows.length).toBe(report.samples.length);
    for (const row of rows) {
      expect(row.querySelectorAll("svg.pixel-image").length).toBe(3);
    }
  });

  it("renders diff pixels from the pre-normalized payload, no rescaling", () => {
    const firstRow = root.querySelector(".impact-row")!;
    const diffSvg = firstRow.querySelectorAll("svg.pixel-image")[2];
    const rects = diffSvg.querySelectorAll("rect");
    const payload = report.samples[0].diff;
    const values = decodeTensor(payload);
    const [, , width] = payload.shape;
    const checkAt = (y: number, x: number) => {
      const level = Math.max(0, Math.min(255, Math.round(values[y * width + x] * 255)));
      const rect = rects[y * width + x];
      expect(rect.getAttribute("fill")).toBe(`rgb(${level},${level},${level})`);
    };
    checkAt(0, 0);
    checkAt(3, 7);
    checkAt(15, 15);
  });

  it("shows per-sample similarity verbatim", () => {
    const nodes = [...root.querySelectorAll('[data-metric="similarity"]')];
    expect(nodes.map((n) => n.textContent)).toEqual(
      report.samples.map((s) => `ssim ${String(s.similarity)}`),
    );
  });
});

describe("explainability view", () => {
  let root: HTMLElement;
  beforeEach(() => {
    root = container();
    renderExplainView(root, golden);
  });

  it("renders one section per attacked sample", () => {
    expect(root.querySelectorAll(".explain-sample").length).toBe(
      golden.explain.samples.length,
    );
  });

  it("ranking tables carry k rows of verbatim frequencies, sorted", () => {
    golden.explain.samples.forEach((sample, i) => {
      const section = root.querySelectorAll(".explain-sample")[i];
      const rows = [...section.querySelectorAll(".ranking-row")];
      expect(rows.length).toBe(sample.ranking.length);
      expect(rows.length).toBeLessThanOrEqual(golden.explain.k);
      const diffs = rows.map(
        (r) => r.querySelector('[data-metric="difference"]')!.textContent,
      );
      expect(diffs).toEqual(sample.ranking.map((e) => String(e.difference)));
      const numeric = sample.ranking.map((e) => e.difference);
      for (let j = 1; j < numeric.length; j++) {
        expect(numeric[j]).toBeLessThanOrEqual(numeric[j - 1]);
      }
      const freqs = rows.map(
        (r) => r.querySelector('[data-metric="freq_a"]')!.textContent,
      );
      expect(freqs).toEqual(sample.ranking.map((e) => String(e.freq_a)));
    });
  });

  it("draws one chart per monitored neuron with a point per attack state", () => {
    const sample = golden.explain.samples[0];
    const section = root.querySelector(".explain-sample")!;
    const charts = [...section.querySelectorAll(".trace-cell")];
    expect(charts.length).toBe(sample.monitor.neurons.length);
    for (const [i, chart] of charts.entries()) {
      expect(chart.querySelectorAll(".trace-point").length).toBe(
        sample.monitor.values[i].length,
      );
    }
  });
});

describe("command control view", () => {
  function renderWith(models = 2): HTMLElement {
    const root = container();
    renderCommandControl(root, {
      models: Array.from({ length: models }, (_, i) => ({
        id: `model-${i}-0123456789abcdef`,
        class_count: 2,
        embedding_index: 5,
        input_shape: [1, 16, 16],
        layers: ["conv2d", "relu", "maxpool2", "flatten", "dense", "relu", "dense", "softmax"],
      })),
      datasets: [{
        id: "dataset-0-0123456789abcdef",
        count: 128,
        channels: 1,
        height: 16,
        width: 16,
        class_names: ["blob", "stripe"],
      }],
      runs: [{ run_id: golden.run_id, kind: "attack", created_at: "2026-01-01T00:00:00Z" }],
      launchAttack: () => Promise.resolve(golden),
      launchDefense: () => Promise.resolve(golden),
      fetchManifest: () => Promise.resolve({}),
      onRunReady: () => undefined,
      openRun: () => undefined,
    });
    return root;
  }

  it("model options match the stub server list", () => {
    const root = renderWith(3);
    const options = [...root.querySelectorAll("#model-select option")];
    expect(options.map((o) => o.getAttribute("value"))).toEqual([
      "model-0-0123456789abcdef",
      "model-1-0123456789abcdef",
      "model-2-0123456789abcdef",
    ]);
  });

  it("selecting fgsm hides the steps field; bim shows it", () => {
    const root = renderWith();
    const stepsField = root.querySelector<HTMLElement>('label[for="steps"]')!;
    expect(stepsField.style.display).toBe("none");
    root.querySelector<HTMLInputElement>("#attack-bim")!.dispatchEvent(
      new Event("change"),
    );
    expect(stepsField.style.display).toBe("");
    root.querySelector<HTMLInputElement>("#attack-fgsm")!.dispatchEvent(
      new Event("change"),
    );
    expect(stepsField.style.display).toBe("none");
  });

  it("negative epsilon disables launch", () => {
    const root = renderWith();
    const epsilon = root.querySelector<HTMLInputElement>("#epsilon")!;
    const launch = root.querySelector<HTMLButtonElement>("#launch")!;
    expect(launch.hasAttribute("disabled")).toBe(false);
    epsilon.value = "-0.1";
    epsilon.dispatchEvent(new Event("input"));
    expect(launch.hasAttribute("disabled")).toBe(true);
    epsilon.value = "0.2";
    epsilon.dispatchEvent(new Event("input"));
    expect(launch.hasAttribute("disabled")).toBe(false);
  });

  it("recent runs list offers the stored run", () => {
    const root = renderWith();
    const link = root.querySelector("#run-list a")!;
    expect(link.getAttribute("data-run")).toBe(golden.run_id);
  });
});
