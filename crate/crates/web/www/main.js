import init, { sweep, edge_profile, cancellation_root } from "./pkg/spect_mb_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => parseFloat($(id).value);

function plot(canvas, xs, series) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  ctx.clearRect(0, 0, w, h);
  const pad = 30;
  const xmin = xs[0], xmax = xs[xs.length - 1];
  series.forEach(({ ys, color, label }, k) => {
    const finite = ys.filter(Number.isFinite);
    let ymin = Math.min(...finite), ymax = Math.max(...finite);
    if (ymax - ymin < 1e-12) { ymin -= 1; ymax += 1; }
    const px = (x) => pad + (x - xmin) / (xmax - xmin) * (w - 2 * pad);
    const py = (y) => h - pad - (y - ymin) / (ymax - ymin) * (h - 2 * pad);
    ctx.strokeStyle = color;
    ctx.beginPath();
    xs.forEach((x, i) => (i ? ctx.lineTo(px(x), py(ys[i])) : ctx.moveTo(px(x), py(ys[i]))));
    ctx.stroke();
    ctx.fillStyle = color;
    ctx.fillText(`${label}  [${ymin.toPrecision(3)}, ${ymax.toPrecision(3)}]`, pad + 4, 14 + 14 * k);
  });
  ctx.fillStyle = "#555";
  ctx.fillText(xmin.toFixed(2), pad, h - 10);
  ctx.fillText(xmax.toFixed(2), w - pad - 24, h - 10);
}

function runSweep() {
  $("sw-f2v").textContent = num("sw-f2").toFixed(4);
  const n = 1200;
  try {
    const v = sweep("radial", num("sw-c"), num("sw-f1"), num("sw-f2"), num("sw-x"), num("sw-y"), num("sw-lo"), num("sw-hi"), n);
    const om = Array.from(v.slice(0, n)), val = Array.from(v.slice(n, 2 * n)), d1 = Array.from(v.slice(2 * n));
    plot($("sw-plot"), om, [
      { ys: val, color: "#1f77b4", label: "R" },
      { ys: d1, color: "#d62728", label: "dR/dω" },
    ]);
    $("sw-msg").textContent = "";
  } catch (e) {
    $("sw-msg").textContent = e.message ?? String(e);
  }
}

function runProfile() {
  $("ep-f1v").textContent = num("ep-f1").toFixed(4);
  const n = 71;
  try {
    const v = edge_profile(num("ep-c"), num("ep-f1"), num("ep-f2"), -0.1, 0.6, n);
    plot($("ep-plot"), Array.from(v.slice(0, n)), [{ ys: Array.from(v.slice(n)), color: "#2ca02c", label: "jump" }]);
    $("ep-msg").textContent = "";
  } catch (e) {
    $("ep-msg").textContent = e.message ?? String(e);
  }
}

function runRoot() {
  const family = $("cr-family").value;
  try {
    const root = cancellation_root(family, num("cr-c"), num("cr-other"));
    $("cr-out").textContent = `${family === "radial" ? "f2" : "f1"} = ${root.toFixed(6)}`;
    if (family === "radial") {
      $("sw-c").value = num("cr-c");
      $("sw-f1").value = num("cr-other");
      $("sw-f2").value = root;
      runSweep();
    } else {
      $("ep-c").value = num("cr-c");
      $("ep-f2").value = num("cr-other");
      $("ep-f1").value = root;
      runProfile();
    }
  } catch (e) {
    $("cr-out").textContent = e.message ?? String(e);
  }
}

await init();
for (const id of ["sw-c", "sw-f1", "sw-f2", "sw-x", "sw-y", "sw-lo", "sw-hi"]) $(id).addEventListener("input", runSweep);
for (const id of ["ep-c", "ep-f1", "ep-f2"]) $(id).addEventListener("input", runProfile);
$("cr-go").addEventListener("click", runRoot);
runSweep();
runProfile();
