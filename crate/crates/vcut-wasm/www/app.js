// Built with: wasm-pack build --target web --out-dir www/pkg crates/vcut-wasm
import init, { generate, run, oracle } from "./pkg/vcut_wasm.js";

const $ = (id) => document.getElementById(id);
const state = { graph: null, pos: [], runCut: [], oracleCut: [] };

function status(msg, error = false) {
  $("status").textContent = msg;
  $("status").className = error ? "error" : "";
}

function showParams() {
  const fam = $("family").value;
  for (const el of document.querySelectorAll("label[data-for]")) {
    el.style.display = el.dataset.for.split(" ").includes(fam) ? "" : "none";
  }
}

function spec() {
  const fam = $("family").value;
  const num = (id) => Number($(id).value);
  const s = { family: fam, seed: num("gseed") };
  if (["cycle", "path", "tree", "clique", "gnp"].includes(fam)) s.n = num("n");
  if (fam === "gnp") Object.assign(s, { p: num("p"), connected: true });
  if (fam === "planted_separator") {
    Object.assign(s, { a: num("a"), k: num("k"), b: num("b"), density: num("density") });
  }
  return s;
}

function edgeList(g) {
  return `${g.n} ${g.edges.length}\n` + g.edges.map(([u, v]) => `${u} ${v}`).join("\n") + "\n";
}

// Spring layout seeded on a circle; good enough for a few hundred vertices.
function layout(g, w, h) {
  const n = g.n;
  const pos = Array.from({ length: n }, (_, i) => {
    const t = (2 * Math.PI * i) / n;
    return [w / 2 + 0.4 * w * Math.cos(t), h / 2 + 0.4 * h * Math.sin(t)];
  });
  const ideal = Math.sqrt((w * h) / Math.max(n, 1)) * 0.8;
  for (let iter = 0, temp = w / 10; iter < 300; iter++, temp *= 0.985) {
    const disp = pos.map(() => [0, 0]);
    for (let i = 0; i < n; i++) {
      for (let j = i + 1; j < n; j++) {
        const dx = pos[i][0] - pos[j][0], dy = pos[i][1] - pos[j][1];
        const d2 = Math.max(dx * dx + dy * dy, 0.01);
        const f = (ideal * ideal) / d2;
        disp[i][0] += dx * f; disp[i][1] += dy * f;
        disp[j][0] -= dx * f; disp[j][1] -= dy * f;
      }
    }
    for (const [u, v] of g.edges) {
      const dx = pos[u][0] - pos[v][0], dy = pos[u][1] - pos[v][1];
      const d = Math.max(Math.hypot(dx, dy), 0.1);
      const f = d / ideal;
      disp[u][0] -= dx * f; disp[u][1] -= dy * f;
      disp[v][0] += dx * f; disp[v][1] += dy * f;
    }
    for (let i = 0; i < n; i++) {
      const d = Math.max(Math.hypot(disp[i][0], disp[i][1]), 0.01);
      const step = Math.min(d, temp);
      pos[i][0] = Math.min(w - 12, Math.max(12, pos[i][0] + (disp[i][0] / d) * step));
      pos[i][1] = Math.min(h - 12, Math.max(12, pos[i][1] + (disp[i][1] / d) * step));
    }
  }
  return pos;
}

function draw() {
  const c = $("canvas"), ctx = c.getContext("2d");
  ctx.clearRect(0, 0, c.width, c.height);
  const g = state.graph;
  if (!g) return;
  const inRun = new Set(state.runCut), inOracle = new Set(state.oracleCut);
  const inPlanted = new Set(g.planted || []);
  const r = g.n > 150 ? 3 : 6;
  ctx.strokeStyle = "#bbb";
  ctx.lineWidth = 1;
  for (const [u, v] of g.edges) {
    ctx.beginPath();
    ctx.moveTo(...state.pos[u]);
    ctx.lineTo(...state.pos[v]);
    ctx.stroke();
  }
  for (let v = 0; v < g.n; v++) {
    const [x, y] = state.pos[v];
    ctx.beginPath();
    ctx.arc(x, y, inRun.has(v) || inOracle.has(v) ? r + 2 : r, 0, 2 * Math.PI);
    ctx.fillStyle = inRun.has(v) ? "#d33" : inPlanted.has(v) ? "#fc3" : "#555";
    ctx.fill();
    if (inOracle.has(v)) {
      ctx.lineWidth = 2;
      ctx.strokeStyle = "#27c";
      ctx.stroke();
      ctx.strokeStyle = "#bbb";
      ctx.lineWidth = 1;
    }
  }
}

function attempt(f) {
  try {
    f();
  } catch (e) {
    status(String(e.message || e), true);
  }
}

function onGenerate() {
  attempt(() => {
    const g = JSON.parse(generate(JSON.stringify(spec())));
    const c = $("canvas");
    Object.assign(state, { graph: g, pos: layout(g, c.width, c.height), runCut: [], oracleCut: [] });
    $("out").textContent = "";
    status(`n = ${g.n}, m = ${g.edges.length}` + (g.planted ? `, planted separator ${JSON.stringify(g.planted)}` : ""));
    draw();
  });
}

function onRun() {
  if (!state.graph) return status("generate a graph first", true);
  attempt(() => {
    const kappa = Number($("kappa").value);
    const t0 = performance.now();
    const res = JSON.parse(run(edgeList(state.graph), kappa, BigInt($("seed").value), $("algo").value));
    state.runCut = res.cut;
    $("out").textContent = JSON.stringify(res, null, 2);
    status(`${res.verdict} after ${res.rounds} rounds (${(performance.now() - t0).toFixed(0)} ms)`);
    draw();
  });
}

function onCompare() {
  if (!state.graph) return status("generate a graph first", true);
  attempt(() => {
    const kappa = Number($("kappa").value);
    const res = JSON.parse(run(edgeList(state.graph), kappa, BigInt($("seed").value), $("algo").value));
    const ref = JSON.parse(oracle(edgeList(state.graph), kappa));
    state.runCut = res.cut;
    state.oracleCut = ref.cut;
    const agree = res.verdict === ref.verdict;
    $("out").textContent = JSON.stringify({ run: res, oracle: ref, agree }, null, 2);
    status(agree ? `run and oracle agree: ${ref.verdict}` : `mismatch: run says ${res.verdict}, oracle says ${ref.verdict}`, !agree);
    draw();
  });
}

await init();
$("family").addEventListener("change", showParams);
$("generate").addEventListener("click", onGenerate);
$("run").addEventListener("click", onRun);
$("compare").addEventListener("click", onCompare);
showParams();
onGenerate();
