import init, { breakdown, evpi_heatmap, preset_curves } from "./pkg/unli_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => parseFloat($(id).value);
const fmt = (x) => (Math.abs(x) >= 1e-4 || x === 0 ? x.toFixed(6) : x.toExponential(4));

function guard(errorId, f) {
  try {
    $(errorId).textContent = "";
    f();
  } catch (e) {
    $(errorId).textContent = e.message ?? String(e);
  }
}

// Closed form, term by term.

const TERMS = ["u₁₂", "v₁₂", "u₂₁", "v₂₁", "total"];

function drawBars(canvas, values) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  ctx.clearRect(0, 0, w, h);
  const top = Math.max(...values.map(Math.abs), 1e-12);
  const mid = h / 2;
  const slot = w / values.length;
  ctx.strokeStyle = "#999";
  ctx.beginPath();
  ctx.moveTo(0, mid);
  ctx.lineTo(w, mid);
  ctx.stroke();
  ctx.font = "12px system-ui";
  ctx.textAlign = "center";
  values.forEach((v, k) => {
    const len = (v / top) * (mid - 18);
    ctx.fillStyle = k === values.length - 1 ? "#2a6" : v >= 0 ? "#36c" : "#c63";
    ctx.fillRect(k * slot + slot * 0.2, mid - Math.max(len, 0), slot * 0.6, Math.abs(len));
    ctx.fillStyle = "#222";
    ctx.fillText(TERMS[k], k * slot + slot / 2, v >= 0 ? mid + 14 : mid - 6);
  });
}

function updateBreakdown() {
  $("bd-rho-v").textContent = num("bd-rho").toFixed(2);
  guard("bd-error", () => {
    const b = breakdown(num("bd-mu1"), num("bd-mu2"), num("bd-sd1"), num("bd-sd2"), num("bd-rho"));
    $("bd-table").innerHTML = TERMS.map((t, k) => `<tr><th>${t}</th><td>${fmt(b[k])}</td></tr>`).join("");
    drawBars($("bd-canvas"), Array.from(b));
  });
}

// EVPI heatmap.

const STEPS = 105;
let heat = null;

function colour(t) {
  const stops = [[68, 1, 84], [59, 82, 139], [33, 145, 140], [94, 201, 98], [253, 231, 37]];
  const x = Math.min(Math.max(t, 0), 1) * (stops.length - 1);
  const i = Math.min(Math.floor(x), stops.length - 2);
  const f = x - i;
  return stops[i].map((c, k) => Math.round(c + f * (stops[i + 1][k] - c)));
}

function updateHeatmap() {
  $("hm-rho-v").textContent = num("hm-rho").toFixed(2);
  guard("hm-error", () => {
    const extent = num("hm-extent");
    const values = evpi_heatmap(extent, STEPS, num("hm-sd1"), num("hm-sd2"), num("hm-rho"));
    heat = { values, extent, max: Math.max(...values) };
    const canvas = $("hm-canvas");
    const ctx = canvas.getContext("2d");
    const img = ctx.createImageData(canvas.width, canvas.height);
    for (let y = 0; y < canvas.height; y++) {
      const row = STEPS - 1 - Math.floor((y / canvas.height) * STEPS);
      for (let x = 0; x < canvas.width; x++) {
        const col = Math.floor((x / canvas.width) * STEPS);
        const [r, g, b] = colour(values[row * STEPS + col] / heat.max);
        const p = 4 * (y * canvas.width + x);
        img.data.set([r, g, b, 255], p);
      }
    }
    ctx.putImageData(img, 0, 0);
    ctx.strokeStyle = "rgba(255,255,255,0.6)";
    ctx.beginPath();
    ctx.moveTo(canvas.width / 2, 0);
    ctx.lineTo(canvas.width / 2, canvas.height);
    ctx.moveTo(0, canvas.height / 2);
    ctx.lineTo(canvas.width, canvas.height / 2);
    ctx.stroke();
    $("hm-info").textContent = `μ₁ across, μ₂ up, both in [−${extent}, ${extent}]. Maximum EVPI ${fmt(heat.max)}.`;
  });
}

function hoverHeatmap(ev) {
  if (!heat) return;
  const canvas = $("hm-canvas");
  const rect = canvas.getBoundingClientRect();
  const col = Math.floor(((ev.clientX - rect.left) / rect.width) * STEPS);
  const row = STEPS - 1 - Math.floor(((ev.clientY - rect.top) / rect.height) * STEPS);
  if (col < 0 || col >= STEPS || row < 0 || row >= STEPS) return;
  const at = (k) => -heat.extent + (2 * heat.extent * k) / (STEPS - 1);
  $("hm-info").textContent =
    `μ₁ = ${at(col).toFixed(2)}, μ₂ = ${at(row).toFixed(2)}: EVPI = ${fmt(heat.values[row * STEPS + col])}`;
}

// EVPI curves.

function drawCurves(canvas, wtps, closed, boot) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = { l: 60, r: 20, t: 20, b: 40 };
  ctx.clearRect(0, 0, w, h);
  const xmax = wtps[wtps.length - 1] || 1;
  const ymax = Math.max(...closed, ...boot, 1);
  const X = (v) => pad.l + (v / xmax) * (w - pad.l - pad.r);
  const Y = (v) => h - pad.b - (v / ymax) * (h - pad.t - pad.b);

  ctx.strokeStyle = "#999";
  ctx.fillStyle = "#444";
  ctx.font = "12px system-ui";
  ctx.beginPath();
  ctx.moveTo(pad.l, pad.t);
  ctx.lineTo(pad.l, h - pad.b);
  ctx.lineTo(w - pad.r, h - pad.b);
  ctx.stroke();
  ctx.textAlign = "center";
  for (let k = 0; k <= 4; k++) {
    const v = (xmax * k) / 4;
    ctx.fillText(v.toLocaleString(), X(v), h - pad.b + 16);
  }
  ctx.fillText("willingness to pay per QALY", (pad.l + w - pad.r) / 2, h - 6);
  ctx.textAlign = "right";
  for (let k = 0; k <= 4; k++) {
    const v = (ymax * k) / 4;
    ctx.fillText(Math.round(v).toLocaleString(), pad.l - 6, Y(v) + 4);
  }

  const line = (ys, colour, dash) => {
    ctx.strokeStyle = colour;
    ctx.lineWidth = 2;
    ctx.setLineDash(dash);
    ctx.beginPath();
    ys.forEach((y, k) => (k ? ctx.lineTo(X(wtps[k]), Y(y)) : ctx.moveTo(X(wtps[k]), Y(y))));
    ctx.stroke();
    ctx.setLineDash([]);
    ctx.lineWidth = 1;
  };
  line(closed, "#36c", []);
  line(boot, "#c63", [6, 4]);
  ctx.textAlign = "left";
  ctx.fillStyle = "#36c";
  ctx.fillText("closed form", pad.l + 10, pad.t + 10);
  ctx.fillStyle = "#c63";
  ctx.fillText("bootstrap", pad.l + 10, pad.t + 26);
}

function runCurves() {
  guard("cv-error", () => {
    const t0 = performance.now();
    const flat = preset_curves(100000, 5000, num("cv-b"), num("cv-trial-seed"), num("cv-boot-seed"));
    const n = flat.length / 3;
    const wtps = Array.from(flat.subarray(0, n));
    const closed = Array.from(flat.subarray(n, 2 * n));
    const boot = Array.from(flat.subarray(2 * n));
    drawCurves($("cv-canvas"), wtps, closed, boot);
    const errs = closed.map((c, k) => [c, boot[k]]).filter(([c]) => c > 100).map(([c, b]) => Math.abs(b - c) / c);
    const mrae = errs.reduce((a, b) => a + b, 0) / errs.length;
    const ms = (performance.now() - t0).toFixed(0);
    $("cv-info").textContent =
      `Mean relative absolute error where closed EVPI > 100: ${(100 * mrae).toFixed(2)}% (${ms} ms).`;
  });
}

await init();
for (const id of ["bd-mu1", "bd-mu2", "bd-sd1", "bd-sd2", "bd-rho"]) $(id).addEventListener("input", updateBreakdown);
for (const id of ["hm-sd1", "hm-sd2", "hm-rho", "hm-extent"]) $(id).addEventListener("input", updateHeatmap);
$("hm-canvas").addEventListener("mousemove", hoverHeatmap);
$("cv-run").addEventListener("click", runCurves);
updateBreakdown();
updateHeatmap();
runCurves();
