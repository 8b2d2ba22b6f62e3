import init, { efficiency_scan, sturm_spectrum, reconstruct_demo } from "./pkg/gratescat_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => parseFloat($(id).value);

// series: [{ xs, ys, color, dots }]
function plot(canvas, series, xlabel, ylabel) {
  const ctx = canvas.getContext("2d");
  const w = canvas.width, h = canvas.height, pad = 40;
  ctx.clearRect(0, 0, w, h);
  const xs = series.flatMap((s) => s.xs), ys = series.flatMap((s) => s.ys);
  let [x0, x1] = [Math.min(...xs), Math.max(...xs)];
  let [y0, y1] = [Math.min(...ys), Math.max(...ys)];
  if (x1 === x0) x1 = x0 + 1;
  if (y1 === y0) { y0 -= 0.5; y1 += 0.5; }
  const px = (x) => pad + ((x - x0) / (x1 - x0)) * (w - 2 * pad);
  const py = (y) => h - pad - ((y - y0) / (y1 - y0)) * (h - 2 * pad);
  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, pad, w - 2 * pad, h - 2 * pad);
  ctx.fillStyle = "#333";
  ctx.font = "12px sans-serif";
  ctx.fillText(xlabel, w / 2, h - 8);
  ctx.fillText(ylabel, 4, pad - 10);
  ctx.fillText(x0.toPrecision(3), pad, h - pad + 14);
  ctx.fillText(x1.toPrecision(3), w - pad - 30, h - pad + 14);
  ctx.fillText(y0.toPrecision(3), 2, h - pad);
  ctx.fillText(y1.toPrecision(3), 2, pad + 10);
  for (const s of series) {
    ctx.strokeStyle = ctx.fillStyle = s.color;
    if (s.dots) {
      s.xs.forEach((x, i) => ctx.fillRect(px(x) - 2, py(s.ys[i]) - 2, 4, 4));
    } else {
      ctx.beginPath();
      s.xs.forEach((x, i) => (i ? ctx.lineTo(px(x), py(s.ys[i])) : ctx.moveTo(px(x), py(s.ys[i]))));
      ctx.stroke();
    }
  }
}

function rows(flat, width) {
  const out = [];
  for (let i = 0; i + width <= flat.length; i += width) out.push(Array.from(flat.slice(i, i + width)));
  return out;
}

function guarded(statusId, f) {
  return () => {
    const t = performance.now();
    try {
      const msg = f();
      $(statusId).textContent = `${msg}  (${(performance.now() - t).toFixed(0)} ms)`;
    } catch (e) {
      $(statusId).textContent = `error: ${e.message ?? e}`;
    }
  };
}

$("scan-run").onclick = guarded("scan-status", () => {
  const r = rows(efficiency_scan(num("scan-k"), num("scan-qre"), num("scan-qim"), num("scan-amp"),
    num("scan-b"), 0.05, 1.5, Math.max(2, num("scan-steps") | 0), 6), 4);
  const th = r.map((x) => x[0]);
  plot($("scan-plot"), [
    { xs: th, ys: r.map((x) => x[1]), color: "#1f5fbf" },
    { xs: th, ys: r.map((x) => x[2]), color: "#c0392b" },
  ], "elevation θ1 (rad)", "total (blue), specular (red)");
  const minTotal = Math.min(...r.map((x) => x[1]));
  return `${r.length} angles, smallest total reflected efficiency ${minTotal.toFixed(6)}`;
});

$("sl-run").onclick = guarded("sl-status", () => {
  const r = rows(sturm_spectrum(num("sl-qre"), num("sl-qim"), num("sl-amp"), num("sl-k"), num("sl-alpha"),
    num("sl-m") | 0), 3);
  const inner = r.filter((x) => Math.abs(x[0]) <= (num("sl-m") | 0) / 2);
  plot($("sl-plot"), [{ xs: inner.map((x) => x[1]), ys: inner.map((x) => x[2]), color: "#1f5fbf", dots: true }],
    "Re λ", "Im λ");
  return `${r.length} eigenvalues, showing |m| ≤ ${(num("sl-m") | 0) / 2}`;
});

$("rc-run").onclick = guarded("rc-status", () => {
  const n = 128;
  const out = reconstruct_demo(new Float64Array([num("rc-d0"), num("rc-d1"), num("rc-d2")]), n);
  const r = rows(out.slice(0, 3 * n), 3);
  plot($("rc-plot"), [
    { xs: r.map((x) => x[0]), ys: r.map((x) => x[1]), color: "#888" },
    { xs: r.map((x) => x[0]), ys: r.map((x) => x[2]), color: "#c0392b" },
  ], "x1", "planted (grey), recovered (red)");
  const err = Math.max(...r.map((x) => Math.abs(x[1] - x[2])));
  return `max pointwise error ${err.toExponential(2)}`;
});

await init();
for (const id of ["scan-run", "sl-run", "rc-run"]) $(id).click();
