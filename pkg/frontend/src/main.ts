/** Single-page wiring: three tabs (Command Control, Impact, Explainability)
 * over one fetched-run cache, plus the base-URL setting. */

import { api, getBaseUrl, setBaseUrl } from "./api.js";
import { el } from "./dom.js";
import type { RunRecord } from "./types.js";
import { renderCommandControl } from "./views/command.js";
import { renderExplainView } from "./views/explain.js";
import { renderImpactView } from "./views/impact.js";

type ViewName = "command" | "impact" | "explain";

export function bootstrap(root: HTMLElement): void {
  let activeRun: RunRecord | null = null;
  let active: ViewName = "command";

  const tabs: Record<ViewName, HTMLButtonElement> = {
    command: el("button", { type: "button", id: "tab-command" }, ["Command Control"]),
    impact: el("button", { type: "button", id: "tab-impact" }, ["Impact"]),
    explain: el("button", { type: "button", id: "tab-explain" }, ["Explainability"]),
  };
  const baseInput = el("input", { id: "base-url", value: getBaseUrl() });
  baseInput.addEventListener("change", () => {
    setBaseUrl(baseInput.value);
    show("command");
  });

  const nav = el("nav", {}, [
    tabs.command,
    tabs.impact,
    tabs.explain,
    el("span", { class: "spacer" }, [" API "]),
    baseInput,
  ]);
  const content = el("main", { id: "view" });
  root.replaceChildren(nav, content);

  function show(view: ViewName): void {
    active = view;
    for (const [name, button] of Object.entries(tabs)) {
      button.classList.toggle("active", name === view);
    }
    if (view === "command") {
      renderCommand();
    } else if (!activeRun) {
      content.replaceChildren(
        el("p", { class: "placeholder" }, ["launch or open a run first"]),
      );
    } else if (view === "impact") {
      renderImpactView(content, activeRun);
    } else {
      renderExplainView(content, activeRun);
    }
  }

  function renderCommand(): void {
    content.replaceChildren(el("p", { class: "placeholder" }, ["loading…"]));
    Promise.all([api.listModels(), api.listDatasets(), api.listRuns()])
      .then(([models, datasets, runs]) => {
        if (active !== "command") return;
        renderCommandControl(content, {
          models,
          datasets,
          runs,
          launchAttack: api.launchAttack,
          launchDefense: api.launchDefense,
          fetchManifest: (id) => api.getModel(id).then((m) => m.manifest),
          onRunReady: (record) => {
            activeRun = record;
            show("impact");
          },
          openRun: (runId) => {
            api.getRun(runId).then((record) => {
              activeRun = record;
              show("impact");
            });
          },
        });
      })
      .catch((err: Error) => {
        content.replaceChildren(
          el("p", { class: "errors" }, [`cannot reach the API: ${err.message}`]),
        );
      });
  }

  tabs.command.addEventListener("click", () => show("command"));
  tabs.impact.addEventListener("click", () => show("impact"));
  tabs.explain.addEventListener("click", () => show("explain"));
  show("command");
}

const rootElement = typeof document !== "undefined" ? document.getElementById("app") : null;
if (rootElement) {
  bootstrap(rootElement);
}
