// Console wiring: create a trial from the design catalog (parameter form is
// generated from the schema payload), then loop on grid + cohort entry +
// timeline.  Every recommendation shown comes verbatim from the service.

import { ConductClient } from "./api.js";
import { historyTimeline, renderGrid } from "./model.js";
import { gridToTable, timelineToList } from "./render.js";
import { submitCohort } from "./form.js";
import type { DesignInfo, TrialView } from "./types.js";

const client = new ConductClient("");

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function schemaForm(design: DesignInfo, container: HTMLElement) {
  container.innerHTML = "";
  const props = (design.params_schema as any).properties ?? {};
  const required: string[] = (design.params_schema as any).required ?? [];
  for (const [name, spec] of Object.entries<any>(props)) {
    const label = document.createElement("label");
    label.textContent = `${name}${required.includes(name) ? " *" : ""}`;
    const input = document.createElement("input");
    input.name = name;
    input.placeholder = spec.description ?? "";
    if (spec.default !== undefined && spec.default !== null) {
      input.value = JSON.stringify(spec.default);
    }
    label.appendChild(input);
    container.appendChild(label);
  }
}

function collectParams(container: HTMLElement): Record<string, unknown> {
  const params: Record<string, unknown> = {};
  container.querySelectorAll("input").forEach((input) => {
    const raw = input.value.trim();
    if (!raw) return;
    try {
      params[input.name] = JSON.parse(raw);
    } catch {
      params[input.name] = raw;
    }
  });
  return params;
}

async function refresh(view: TrialView) {
  const model = renderGrid(view);
  el("banner").textContent = model.banner;
  el("banner").className = model.terminated ? "banner stopped" : "banner running";
  const gridBox = el("grid");
  gridBox.innerHTML = "";
  gridBox.appendChild(gridToTable(model, document));
  const timelineBox = el("timeline");
  timelineBox.innerHTML = "";
  timelineBox.appendChild(timelineToList(historyTimeline(view.log), document));
  el<HTMLInputElement>("dose-j").value = model.recommendation.dose ? String(model.recommendation.dose.j) : "";
  el<HTMLInputElement>("dose-k").value = model.recommendation.dose ? String(model.recommendation.dose.k) : "";
  el("trial-meta").textContent = `trial ${view.trial_id} · revision ${view.revision} · seed ${view.seed}`;
  (window as any).currentTrial = view;
}

async function main() {
  const catalog = await client.designs();
  const select = el<HTMLSelectElement>("design-select");
  for (const d of catalog.designs) {
    const opt = document.createElement("option");
    opt.value = d.id;
    opt.textContent = `${d.id} - ${d.description}`;
    select.appendChild(opt);
  }
  const paramsBox = el("design-params");
  const renderParams = () => {
    const info = catalog.designs.find((d) => d.id === select.value)!;
    schemaForm(info, paramsBox);
  };
  select.addEventListener("change", renderParams);
  renderParams();

  el("create-form").addEventListener("submit", async (ev) => {
    ev.preventDefault();
    const view = await client.createTrial({
      design: select.value,
      grid: {
        J: Number(el<HTMLInputElement>("grid-j").value),
        K: Number(el<HTMLInputElement>("grid-k").value),
      },
      study: {
        phi: Number(el<HTMLInputElement>("phi").value),
        max_n: Number(el<HTMLInputElement>("max-n").value),
        cohort_size: Number(el<HTMLInputElement>("cohort-size").value),
      },
      params: collectParams(paramsBox),
      seed: Number(el<HTMLInputElement>("seed").value || "0"),
    });
    await refresh(view);
  });

  el("cohort-form").addEventListener("submit", async (ev) => {
    ev.preventDefault();
    const view = (window as any).currentTrial as TrialView | undefined;
    if (!view) return;
    const result = await submitCohort(client, view.trial_id, view.revision, {
      dose: {
        j: Number(el<HTMLInputElement>("dose-j").value),
        k: Number(el<HTMLInputElement>("dose-k").value),
      },
      patients: Number(el<HTMLInputElement>("patients").value),
      dlts: Number(el<HTMLInputElement>("dlts").value),
      override: el<HTMLInputElement>("override").checked,
      note: el<HTMLInputElement>("note").value,
    });
    if (result.kind === "invalid") {
      el("form-errors").textContent = result.errors.join("; ");
      return;
    }
    el("form-errors").textContent =
      result.kind === "conflict" ? "State changed elsewhere; reloaded the latest revision." : "";
    await refresh(await client.getTrial(view.trial_id));
  });

  el("undo-button").addEventListener("click", async () => {
    const view = (window as any).currentTrial as TrialView | undefined;
    if (!view) return;
    await refresh(await client.undo(view.trial_id));
  });
}

main().catch((err) => {
  el("banner").textContent = `failed to load: ${err}`;
});
