import init, { lensTable, shepardCurve, hexAnnuli } from "./pkg/shepard_wasm_demo.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function frame(ctx, xs, ys, pad = 40) {
  const { width: w, height: h } = ctx.canvas;
  ctx.clearRect(0, 0, w, h);
  const [x0, x1] = [Math.min(...xs), Math.max(...xs)];
  let [y0, y1] = [Math.min(...ys), Math.max(...ys)];
  if (y1 === y0) { y0 -= 1; y1 += 1; }
  const sx = (x) => pad + ((x - x0) / (x1 - x0 || 1)) * (w - 2 * pad);
  const sy = (y) => h - pad - ((y - y0) / (y1 - y0)) * (h - 2 * pad);
  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, pad, w - 2 * pad, h - 2 * pad);
  ctx.fillStyle = "#555";
  ctx.font = "11px system-ui";
  ctx.fillText(x0.toPrecision(3), pad, h - pad + 14);
  ctx.fillText(x1.toPrecision(3), w - pad - 24, h - pad + 14);
  ctx.fillText(y1.toPrecision(3), 2, pad + 4);
  ctx.fillText(y0.toPrecision(3), 2, h - pad);
  return { sx, sy };
}

function line(ctx, s, xs, ys, color) {
  ctx.strokeStyle = color;
  ctx.lineWidth = 1.5;
  ctx.beginPath();
  xs.forEach((x, i) => (i ? ctx.lineTo(s.sx(x), s.sy(ys[i])) : ctx.moveTo(s.sx(x), s.sy(ys[i]))));
  ctx.stroke();
}

function guarded(msgId, body) {
  try {
    body();
  } catch (e) {
    $(msgId).textContent = String(e.message ?? e);
    $(msgId).className = "err";
  }
}

function drawLens() {
  guarded("lens-msg", () => {
    const t = lensTable(num("lens-d"), num("lens-steps"));
    const col = (k) => Array.from({ length: t.length / 4 }, (_, i) => t[4 * i + k]);
    const [r, ii, lower, total] = [0, 1, 2, 3].map(col);
    const ctx = $("lens-canvas").getContext("2d");
    const s = frame(ctx, r, [...total, ...lower]);
    line(ctx, s, r, total, "#1f77b4");
    line(ctx, s, r, ii, "#ff7f0e");
    line(ctx, s, r, lower, "#2ca02c");
    const gap = Math.min(...ii.map((v, i) => v - lower[i]));
    $("lens-msg").className = "note";
    $("lens-msg").textContent = `min(inner − lower) = ${gap.toExponential(3)}`;
  });
}

function drawCurve() {
  guarded("curve-msg", () => {
    const out = shepardCurve(num("curve-n"), $("curve-kernel").value, num("curve-alpha"), $("curve-f").value, 600);
    const [sup, bound] = [out[0], out[1]];
    const m = (out.length - 2) / 3;
    const col = (k) => Array.from({ length: m }, (_, i) => out[2 + 3 * i + k]);
    const [x, f, g] = [0, 1, 2].map(col);
    const ctx = $("curve-canvas").getContext("2d");
    const s = frame(ctx, x, [...f, ...g]);
    line(ctx, s, x, f, "#aaa");
    line(ctx, s, x, g, "#1f77b4");
    $("curve-msg").className = "note";
    $("curve-msg").textContent =
      `sampled sup error ${sup.toExponential(3)}, bound ${bound.toExponential(3)}, ratio ${(sup / bound).toExponential(2)}`;
  });
}

function drawHex() {
  guarded("hex-msg", () => {
    const out = hexAnnuli(num("hex-n"));
    const m = out[0];
    const pts = $("hex-points").getContext("2d");
    const { width: w, height: h } = pts.canvas;
    pts.clearRect(0, 0, w, h);
    pts.fillStyle = "#1f77b4";
    const scale = Math.min(w / Math.sqrt(3), h / 2);
    const r = Math.max(1, Math.min(3, 60 / Math.sqrt(m)));
    for (let i = 0; i < m; i++) {
      pts.beginPath();
      pts.arc(out[1 + 2 * i] * scale, h - out[2 + 2 * i] * scale, r, 0, 2 * Math.PI);
      pts.fill();
    }
    const shells = out[1 + 2 * m];
    const base = 2 + 2 * m;
    const j = Array.from({ length: shells }, (_, k) => k + 1);
    const count = j.map((_, k) => out[base + 2 * k]);
    const bound = j.map((_, k) => out[base + 2 * k + 1]);
    const ctx = $("hex-canvas").getContext("2d");
    const s = frame(ctx, [0.5, shells + 0.5], [0, ...bound]);
    ctx.fillStyle = "#9ecae1";
    j.forEach((jj, k) => {
      const x0 = s.sx(jj - 0.4), x1 = s.sx(jj + 0.4);
      ctx.fillRect(x0, s.sy(count[k]), x1 - x0, s.sy(0) - s.sy(count[k]));
    });
    line(ctx, s, j, bound, "#d62728");
    const worst = Math.max(...count.map((c, k) => c / bound[k]));
    $("hex-msg").className = "note";
    $("hex-msg").textContent = `${m} points, ${shells} shells, max count/bound = ${worst.toFixed(3)}`;
  });
}

await init();
for (const id of ["lens-d", "lens-steps"]) $(id).addEventListener("input", drawLens);
for (const id of ["curve-n", "curve-kernel", "curve-alpha", "curve-f"]) $(id).addEventListener("input", drawCurve);
$("hex-n").addEventListener("input", drawHex);
drawLens();
drawCurve();
drawHex();
