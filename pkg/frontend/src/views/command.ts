/** Command Control view: model/dataset selection, attack and defense radio
 * groups with their numeric parameter fields, validation mirroring the API
 * contract, and the launch action. Selecting fgsm hides the steps field;
 * bim/pgd show it. Launch stays disabled while the form is invalid; API
 * rejections are shown verbatim. */

import { el } from "../dom.js";
import type {
  AttackAlgorithm,
  DatasetSummary,
  DefenseKind,
  ModelSummary,
  RunIndexEntry,
  RunRecord,
} from "../types.js";
import {
  AttackFormState,
  DefenseFormState,
  attackFormErrors,
  attackNeedsSteps,
  buildAttackBlock,
  buildDefenseBlock,
  defenseFormErrors,
} from "../validate.js";

export interface CommandDeps {
  models: ModelSummary[];
  datasets: DatasetSummary[];
  runs: RunIndexEntry[];
  launchAttack: (body: Record<string, unknown>) => Promise<RunRecord>;
  launchDefense: (body: Record<string, unknown>) => Promise<RunRecord>;
  fetchManifest: (modelId: string) => Promise<Record<string, unknown>>;
  onRunReady: (record: RunRecord) => void;
  openRun: (runId: string) => void;
}

const ATTACKS: AttackAlgorithm[] = ["fgsm", "bim", "pgd"];
const DEFENSES: DefenseKind[] = [
  "none",
  "adversarial_training",
  "dim_reduction_input",
  "dim_reduction_embedding",
  "prediction_similarity",
];

export function renderCommandControl(container: HTMLElement, deps: CommandDeps): void {
  container.replaceChildren();
  container.append(el("h2", {}, ["Command Control"]));

  const attackForm: AttackFormState = {
    algorithm: "fgsm",
    epsilon: "0.1",
    steps: "10",
    sampleCount: "32",
    seed: "0",
  };
  const defenseForm: DefenseFormState = {
    kind: "none",
    mixRatio: "",
    epochs: "",
    lr: "",
    latentDim: "",
    windowCapacity: "",
    similarityThreshold: "",
    riskThreshold: "",
  };

  // model / dataset selection
  const modelSelect = el("select", { id: "model-select" });
  for (const m of deps.models) {
    modelSelect.append(el("option", { value: m.id }, [
      `${m.id.slice(0, 12)} (${m.layers.join("-")})`,
    ]));
  }
  const datasetSelect = el("select", { id: "dataset-select" });
  for (const d of deps.datasets) {
    datasetSelect.append(el("option", { value: d.id }, [
      `${d.id.slice(0, 12)} (${d.count}×${d.channels}×${d.height}×${d.width})`,
    ]));
  }
  const manifestPane = el("pre", { id: "model-manifest", class: "manifest" });
  const infoButton = el("button", { type: "button", id: "model-info" }, ["model info"]);
  infoButton.addEventListener("click", () => {
    const id = modelSelect.value;
    if (!id) return;
    deps
      .fetchManifest(id)
      .then((manifest) => {
        manifestPane.textContent = JSON.stringify(manifest, null, 2);
      })
      .catch((err) => {
        manifestPane.textContent = String(err);
      });
  });

  container.append(
    el("fieldset", {}, [
      el("legend", {}, ["model and data"]),
      el("label", { for: "model-select" }, ["model "]),
      modelSelect,
      infoButton,
      el("label", { for: "dataset-select" }, [" dataset "]),
      datasetSelect,
      manifestPane,
    ]),
  );

  // attack controls
  const errorPane = el("p", { id: "form-errors", class: "errors" });
  const apiPane = el("p", { id: "api-error", class: "errors" });
  const launch = el("button", { type: "button", id: "launch" }, ["launch"]);

  const numericField = (id: string, label: string, value: string) => {
    const input = el("input", { id, type: "number", step: "any", value });
    const wrap = el("label", { class: "field", for: id }, [label + " ", input]);
    return { input, wrap };
  };

  const epsilon = numericField("epsilon", "epsilon", attackForm.epsilon);
  const steps = numericField("steps", "steps", attackForm.steps);
  const samples = numericField("samples", "samples", attackForm.sampleCount);
  const seed = numericField("seed", "seed", attackForm.seed);

  const attackRadios = el("div", { class: "radio-group", id: "attack-choice" });
  for (const algorithm of ATTACKS) {
    const radio = el("input", {
      type: "radio",
      name: "attack",
      value: algorithm,
      id: `attack-${algorithm}`,
    });
    if (algorithm === attackForm.algorithm) radio.setAttribute("checked", "");
    radio.addEventListener("change", () => {
      attackForm.algorithm = algorithm;
      refresh();
    });
    attackRadios.append(
      el("label", { for: `attack-${algorithm}` }, [radio, " " + algorithm]),
    );
  }

  container.append(
    el("fieldset", {}, [
      el("legend", {}, ["attack"]),
      attackRadios,
      epsilon.wrap,
      steps.wrap,
      samples.wrap,
      seed.wrap,
    ]),
  );

  // defense controls
  const defenseRadios = el("div", { class: "radio-group", id: "defense-choice" });
  for (const kind of DEFENSES) {
    const radio = el("input", {
      type: "radio",
      name: "defense",
      value: kind,
      id: `defense-${kind}`,
    });
    if (kind === defenseForm.kind) radio.setAttribute("checked", "");
    radio.addEventListener("change", () => {
      defenseForm.kind = kind;
      refresh();
    });
    defenseRadios.append(
      el("label", { for: `defense-${kind}` }, [radio, " " + kind.replace(/_/g, " ")]),
    );
  }
  const mixRatio = numericField("mix-ratio", "mix ratio", "");
  const epochs = numericField("def-epochs", "epochs", "");
  const lr = numericField("def-lr", "learning rate", "");
  const latentDim = numericField("latent-dim", "latent dim", "");
  const windowCapacity = numericField("window-capacity", "window capacity", "");
  const simThreshold = numericField("similarity-threshold", "similarity threshold", "");
  const riskThreshold = numericField("risk-threshold", "risk threshold", "");

  container.append(
    el("fieldset", {}, [
      el("legend", {}, ["defense"]),
      defenseRadios,
      mixRatio.wrap,
      epochs.wrap,
      lr.wrap,
      latentDim.wrap,
      windowCapacity.wrap,
      simThreshold.wrap,
      riskThreshold.wrap,
    ]),
  );

  container.append(launch, errorPane, apiPane);

  // recent runs
  const runList = el("ul", { id: "run-list" });
  for (const entry of deps.runs) {
    const link = el("a", { href: "#", "data-run": entry.run_id }, [
      `${entry.kind} ${entry.run_id.slice(0, 12)} (${entry.created_at})`,
    ]);
    link.addEventListener("click", (event) => {
      event.preventDefault();
      deps.openRun(entry.run_id);
    });
    runList.append(el("li", {}, [link]));
  }
  container.append(el("fieldset", {}, [el("legend", {}, ["recent runs"]), runList]));

  const fieldVisibility: Array<[HTMLElement, () => boolean]> = [
    [steps.wrap, () => attackNeedsSteps(attackForm.algorithm)],
    [mixRatio.wrap, () => defenseForm.kind === "adversarial_training"],
    [epochs.wrap, () => defenseForm.kind.startsWith("dim_reduction")
      || defenseForm.kind === "adversarial_training"],
    [lr.wrap, () => defenseForm.kind.startsWith("dim_reduction")
      || defenseForm.kind === "adversarial_training"],
    [latentDim.wrap, () => defenseForm.kind.startsWith("dim_reduction")],
    [windowCapacity.wrap, () => defenseForm.kind === "prediction_similarity"],
    [simThreshold.wrap, () => defenseForm.kind === "prediction_similarity"],
    [riskThreshold.wrap, () => defenseForm.kind === "prediction_similarity"],
  ];

  function syncFormState(): void {
    attackForm.epsilon = epsilon.input.value;
    attackForm.steps = steps.input.value;
    attackForm.sampleCount = samples.input.value;
    attackForm.seed = seed.input.value;
    defenseForm.mixRatio = mixRatio.input.value;
    defenseForm.epochs = epochs.input.value;
    defenseForm.lr = lr.input.value;
    defenseForm.latentDim = latentDim.input.value;
    defenseForm.windowCapacity = windowCapacity.input.value;
    defenseForm.similarityThreshold = simThreshold.input.value;
    defenseForm.riskThreshold = riskThreshold.input.value;
  }

  function refresh(): void {
    syncFormState();
    for (const [node, visible] of fieldVisibility) {
      node.style.display = visible() ? "" : "none";
    }
    const errors = [
      ...attackFormErrors(attackForm),
      ...defenseFormErrors(defenseForm),
    ];
    if (!modelSelect.value) errors.push("select a model");
    if (!datasetSelect.value) errors.push("select a dataset");
    errorPane.textContent = errors.join("; ");
    if (errors.length) {
      launch.setAttribute("disabled", "");
    } else {
      launch.removeAttribute("disabled");
    }
  }

  for (const field of [epsilon, steps, samples, seed, mixRatio, epochs, lr,
                       latentDim, windowCapacity, simThreshold, riskThreshold]) {
    field.input.addEventListener("input", refresh);
  }
  modelSelect.addEventListener("change", refresh);
  datasetSelect.addEventListener("change", refresh);

  launch.addEventListener("click", () => {
    refresh();
    if (launch.hasAttribute("disabled")) return;
    apiPane.textContent = "";
    const body: Record<string, unknown> = {
      model_id: modelSelect.value,
      dataset_id: datasetSelect.value,
      attack: buildAttackBlock(attackForm),
      sample_count: Number(attackForm.sampleCount),
      seed: Number(attackForm.seed),
    };
    const defense = buildDefenseBlock(attackForm, defenseForm);
    const call = defense
      ? deps.launchDefense({ ...body, defense })
      : deps.launchAttack(body);
    launch.setAttribute("disabled", "");
    call
      .then((record) => deps.onRunReady(record))
      .catch((err: Error) => {
        apiPane.textContent = err.message;
      })
      .finally(() => refresh());
  });

  refresh();
}
