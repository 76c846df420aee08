import init, { classify, estimate, cloud } from "./pkg/hl_atlas_web.js";

const COLORS = {
  "separable": "#4a90d9",
  "bound": "#d9534f",
  "free": "#999999",
  "pocu-candidate": "#2ca02c",
};

const $ = (id) => document.getElementById(id);

function guard(out, f) {
  try {
    f();
  } catch (e) {
    out.textContent = String(e.message ?? e);
  }
}

function runClassify() {
  guard($("c-out"), () => {
    const v = JSON.parse(classify(Number($("c-dim").value), $("c-q").value));
    $("c-out").textContent = JSON.stringify(v, null, 2);
  });
}

function runEstimate() {
  const out = $("e-out");
  guard(out, () => {
    const r = JSON.parse(estimate(Number($("e-dim").value), Number($("e-n").value)));
    const rows = r.atoms
      .map((a) => `<tr><td style="text-align:left">${a.set}</td><td>${a.count}</td><td>${a.probability.toFixed(6)}</td></tr>`)
      .join("");
    out.innerHTML =
      `<p>${r.feasible_total} feasible of ${r.raw_total} raw (rate ${r.acceptance_rate.toExponential(4)})</p>` +
      `<table><tr><th style="text-align:left">atom</th><th>count</th><th>probability</th></tr>${rows}</table>`;
  });
}

let last = null;

function draw() {
  const canvas = $("r-canvas");
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  if (!last) return;
  const [i, j] = $("r-view").value.split(",").map(Number);
  // axis ranges of the feasible simplex: Q1 < 1, Q2 < 1/3, Q3 < 1/2
  const span = [1, 1 / 3, 1 / 2];
  const pad = 30;
  const w = canvas.width - 2 * pad;
  const h = canvas.height - 2 * pad;
  ctx.strokeStyle = "#888";
  ctx.strokeRect(pad, pad, w, h);
  ctx.fillStyle = "#333";
  ctx.fillText(`Q${i + 1}`, canvas.width / 2, canvas.height - 8);
  ctx.save();
  ctx.translate(10, canvas.height / 2);
  ctx.rotate(-Math.PI / 2);
  ctx.fillText(`Q${j + 1}`, 0, 0);
  ctx.restore();
  for (const p of last.points) {
    ctx.fillStyle = COLORS[p.label] ?? "#000";
    const x = pad + (p.q[i] / span[i]) * w;
    const y = pad + h - (p.q[j] / span[j]) * h;
    ctx.fillRect(x - 1, y - 1, 2, 2);
  }
}

function runCloud() {
  const info = $("r-info");
  guard(info, () => {
    last = JSON.parse(cloud($("r-expr").value, Number($("r-n").value)));
    const counts = {};
    for (const p of last.points) counts[p.label] = (counts[p.label] ?? 0) + 1;
    info.textContent = `${last.points.length} points from ${last.raw_scanned} raw indices; ` +
      Object.entries(counts).map(([k, v]) => `${k}: ${v}`).join(", ");
    draw();
  });
}

await init();
$("r-legend").innerHTML = Object.entries(COLORS)
  .map(([k, c]) => `<span style="color:${c}">&#9632; ${k}</span>`)
  .join("");
$("c-run").onclick = runClassify;
$("e-run").onclick = runEstimate;
$("r-run").onclick = runCloud;
$("r-view").onchange = draw;
