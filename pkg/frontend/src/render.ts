// DOM rendering of the view models (browser side; the logic lives in model.ts).

import type { GridViewModel, TimelineEntry } from "./model.js";

export function gridToTable(model: GridViewModel, doc: Document): HTMLTableElement {
  const table = doc.createElement("table");
  table.className = "dose-grid";
  for (const row of model.rows) {
    const tr = doc.createElement("tr");
    for (const cell of row) {
      const td = doc.createElement("td");
      const classes = ["cell"];
      if (cell.shade >= 0) classes.push(`heat-${cell.shade}`);
      if (cell.tried) classes.push("tried");
      if (cell.current) classes.push("current");
      if (cell.recommended) classes.push("recommended");
      td.className = classes.join(" ");
      const est = cell.estimate === null ? "-" : cell.estimate.toFixed(3);
      td.innerHTML =
        `<div class="dose-label">(${cell.dose.j}, ${cell.dose.k})</div>` +
        `<div class="counts">${cell.y}/${cell.n}</div>` +
        `<div class="estimate">${est}</div>`;
      tr.appendChild(td);
    }
    table.appendChild(tr);
  }
  return table;
}

export function timelineToList(entries: TimelineEntry[], doc: Document): HTMLOListElement {
  const ol = doc.createElement("ol");
  ol.className = "timeline";
  for (const entry of entries) {
    const li = doc.createElement("li");
    li.textContent = entry.label;
    ol.appendChild(li);
  }
  return ol;
}
