import init, { missingCurve, estimatorMeans, stopSummary } from "./pkg/missing_tags_demo.js";

const MAX_SESSIONS = 64;
const COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#888"];

const num = (id) => Number(document.getElementById(id).value);
const text = (id, s, isError = false) => {
  const el = document.getElementById(id);
  el.textContent = s;
  el.className = isError ? "note error" : "note";
};
const population = () => ({ n: num("n"), p: num("p"), rho: num("rho"), seed: num("seed") });

function rows(flat, width) {
  const out = [];
  for (let i = 0; i < flat.length; i += width) out.push(Array.from(flat.slice(i, i + width)));
  return out;
}

// Line plot of several series sharing x. `log` plots log10(y), dropping y <= 0.
function plot(canvasId, xs, series, { log = false, yLabel = "" } = {}) {
  const c = document.getElementById(canvasId);
  const g = c.getContext("2d");
  const pad = { l: 56, r: 12, t: 12, b: 28 };
  g.clearRect(0, 0, c.width, c.height);
  const tf = (y) => (log ? (y > 0 ? Math.log10(y) : null) : y);
  const all = series.flatMap((s) => s.ys.map(tf)).filter((y) => y !== null && Number.isFinite(y));
  if (all.length === 0) return;
  let lo = Math.min(...all), hi = Math.max(...all);
  if (hi === lo) { lo -= 1; hi += 1; }
  const x0 = xs[0], x1 = xs[xs.length - 1] === x0 ? x0 + 1 : xs[xs.length - 1];
  const px = (x) => pad.l + ((x - x0) / (x1 - x0)) * (c.width - pad.l - pad.r);
  const py = (y) => c.height - pad.b - ((y - lo) / (hi - lo)) * (c.height - pad.t - pad.b);

  g.strokeStyle = "#999";
  g.fillStyle = "#444";
  g.font = "11px sans-serif";
  g.beginPath();
  g.moveTo(pad.l, pad.t);
  g.lineTo(pad.l, c.height - pad.b);
  g.lineTo(c.width - pad.r, c.height - pad.b);
  g.stroke();
  for (const x of xs) g.fillText(String(x), px(x) - 4, c.height - pad.b + 14);
  for (let k = 0; k <= 4; k++) {
    const y = lo + ((hi - lo) * k) / 4;
    const label = log ? `1e${y.toFixed(1)}` : y.toPrecision(3);
    g.fillText(label, 4, py(y) + 4);
  }
  g.fillText(yLabel, pad.l + 6, pad.t + 10);

  series.forEach((s, i) => {
    g.strokeStyle = COLORS[i % COLORS.length];
    g.beginPath();
    let started = false;
    s.ys.forEach((y, j) => {
      const v = tf(y);
      if (v === null || !Number.isFinite(v)) { started = false; return; }
      if (started) g.lineTo(px(xs[j]), py(v)); else g.moveTo(px(xs[j]), py(v));
      started = true;
    });
    g.stroke();
    g.fillStyle = g.strokeStyle;
    g.fillText(s.name, c.width - pad.r - 150, pad.t + 14 * (i + 1));
  });
}

function bars(canvasId, counts) {
  const c = document.getElementById(canvasId);
  const g = c.getContext("2d");
  g.clearRect(0, 0, c.width, c.height);
  const used = counts.map((v, r) => [r, v]).filter(([, v]) => v > 0);
  if (used.length === 0) return;
  const lo = used[0][0], hi = used[used.length - 1][0];
  const top = Math.max(...used.map(([, v]) => v));
  const w = (c.width - 40) / (hi - lo + 1);
  g.font = "11px sans-serif";
  for (let r = lo; r <= hi; r++) {
    const h = (counts[r] / top) * (c.height - 40);
    g.fillStyle = COLORS[0];
    g.fillRect(20 + (r - lo) * w + 2, c.height - 20 - h, w - 4, h);
    g.fillStyle = "#444";
    g.fillText(String(r), 20 + (r - lo) * w + w / 2 - 4, c.height - 6);
    if (counts[r] > 0) g.fillText(String(counts[r]), 20 + (r - lo) * w + w / 2 - 6, c.height - 24 - h);
  }
}

function guarded(id, fn) {
  return () => {
    try {
      fn();
    } catch (e) {
      text(id, String(e.message ?? e), true);
    }
  };
}

function runCurve() {
  const { n, p, rho, seed } = population();
  const data = rows(missingCurve(n, p, rho, num("curve-r"), seed), 4);
  const xs = data.map((r) => r[0]);
  plot("curve", xs, [
    { name: "true p_M", ys: data.map((r) => r[1]) },
    { name: "estimated p_M (REGM)", ys: data.map((r) => r[2]) },
  ], { log: true, yLabel: "log10 p_M" });
  const first = data.find((r) => r[3] === 0);
  text("curve-text", first ? `every tag read by R = ${first[0]}` : `${data[data.length - 1][3]} tags still unread`);
}

function runMeans() {
  const { n, p, rho, seed } = population();
  const data = rows(estimatorMeans(n, p, rho, num("means-r"), num("means-trials"), seed), 6);
  const xs = data.map((r) => r[0]);
  plot("means", xs, [
    { name: "REGM mean p", ys: data.map((r) => r[1]) },
    { name: "Schnabel mean p", ys: data.map((r) => r[2]) },
    { name: "true p", ys: data.map(() => p) },
  ], { yLabel: "mean estimate of p" });
  const last = data[data.length - 1];
  text(
    "means-text",
    `R=${last[0]}: mean N REGM ${last[3].toFixed(1)}, Schnabel ${last[4].toFixed(1)}, distinct read ${last[5].toFixed(1)}`,
  );
}

function runStop() {
  const { n, p, rho, seed } = population();
  const out = stopSummary(n, p, rho, num("stop-t"), num("stop-margin"), MAX_SESSIONS, num("stop-trials"), seed);
  const [median, mean, miss, cap] = out.slice(0, 4);
  bars("stop", Array.from(out.slice(4)));
  text("stop-text", `median stop R ${median}, mean ${mean.toFixed(2)}, miss rate ${miss.toFixed(4)}, cap rate ${cap.toFixed(4)}`);
}

await init();
document.getElementById("curve-run").onclick = guarded("curve-text", runCurve);
document.getElementById("means-run").onclick = guarded("means-text", runMeans);
document.getElementById("stop-run").onclick = guarded("stop-text", runStop);
guarded("curve-text", runCurve)();
