import init, { prox_curve, gsvt_spectrum, CompletionTrace } from "./pkg/gsvt_demo.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function plot(canvas, series, { xs, ymin, ymax, bars } = {}) {
  const ctx = canvas.getContext("2d");
  const w = canvas.width, h = canvas.height, pad = 30;
  ctx.clearRect(0, 0, w, h);
  const all = series.flatMap((s) => s.ys).filter(Number.isFinite);
  const lo = ymin ?? Math.min(...all), hi = ymax ?? Math.max(...all);
  const n = Math.max(...series.map((s) => s.ys.length));
  const sx = (i) => pad + (w - 2 * pad) * (xs ? xs(i) : i / Math.max(1, n - 1));
  const sy = (v) => h - pad - (h - 2 * pad) * (v - lo) / (hi - lo || 1);
  ctx.strokeStyle = "#ccc";
  ctx.strokeRect(pad, pad, w - 2 * pad, h - 2 * pad);
  ctx.fillStyle = "#666";
  ctx.fillText(hi.toPrecision(3), 2, pad);
  ctx.fillText(lo.toPrecision(3), 2, h - pad);
  for (const s of series) {
    ctx.strokeStyle = ctx.fillStyle = s.color;
    if (bars) {
      s.ys.forEach((v, i) => ctx.fillRect(sx(i) + s.offset, sy(v), 3, sy(lo) - sy(v)));
      continue;
    }
    ctx.beginPath();
    s.ys.forEach((v, i) => (i ? ctx.lineTo(sx(i), sy(v)) : ctx.moveTo(sx(i), sy(v))));
    ctx.stroke();
  }
}

function guarded(errId, f) {
  return () => {
    $(errId).textContent = "";
    try {
      f();
    } catch (e) {
      $(errId).textContent = String(e.message ?? e);
    }
  };
}

const drawProx = guarded("p-err", () => {
  const bmax = num("p-bmax"), points = 400;
  const ys = Array.from(prox_curve($("p-spec").value, bmax, points));
  const diag = ys.map((_, i) => (bmax * i) / (points - 1));
  plot($("p-canvas"), [
    { ys: diag, color: "#999" },
    { ys, color: "#c33" },
  ], { ymin: 0, ymax: bmax });
});

const drawSpectrum = guarded("s-err", () => {
  const v = Array.from(gsvt_spectrum($("s-spec").value, num("s-size"), num("s-rank"), num("s-noise"), BigInt(num("s-seed"))));
  const k = v.length / 2;
  plot($("s-canvas"), [
    { ys: v.slice(0, k), color: "#999", offset: 0 },
    { ys: v.slice(k), color: "#36c", offset: 3 },
  ], { ymin: 0, bars: true });
});

const drawTrace = guarded("c-err", () => {
  const t = new CompletionTrace(num("c-size"), num("c-rank"), num("c-obs"), num("c-noise"), BigInt(num("c-seed")));
  const log = (a) => Array.from(a, (v) => Math.log10(Math.max(v, 1e-16)));
  plot($("c-canvas"), [
    { ys: log(t.gpg), color: "#c33" },
    { ys: log(t.irnn), color: "#36c" },
  ]);
  t.free();
});

await init();
$("p-run").onclick = drawProx;
$("s-run").onclick = drawSpectrum;
$("c-run").onclick = drawTrace;
drawProx();
drawSpectrum();
drawTrace();
