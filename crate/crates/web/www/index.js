import init, { generate, solve, simulate } from "./pkg/cascade_affect_web.js";

const $ = (id) => document.getElementById(id);
let puzzle = null;

function drawGrid(cells, givenMask, title) {
  const box = document.createElement("div");
  box.className = "grid";
  box.innerHTML = `<div>${title}</div>`;
  cells.forEach((row, r) => {
    const line = document.createElement("div");
    line.className = "row";
    row.forEach((v, c) => {
      const cell = document.createElement("div");
      const given = givenMask && givenMask[r][c] !== null;
      cell.className = "cell " + (v === null ? "blank" : given ? "given" : "filled");
      cell.textContent = v === null ? "?" : v;
      line.appendChild(cell);
    });
    box.appendChild(line);
  });
  return box;
}

function showPuzzle(extra) {
  const grids = $("grids");
  grids.replaceChildren(drawGrid(puzzle.cells, puzzle.cells, "puzzle"));
  if (extra) grids.appendChild(extra);
}

function onGenerate() {
  $("puzzle-msg").textContent = "";
  try {
    puzzle = JSON.parse(generate(+$("rows").value, +$("vmax").value, $("sub").checked, BigInt($("pseed").value)));
    showPuzzle();
  } catch (e) {
    $("puzzle-msg").innerHTML = `<span class="err">${e.message ?? e}</span>`;
  }
}

function onSolve() {
  if (!puzzle) return;
  const reply = JSON.parse(solve(JSON.stringify(puzzle)));
  const title = reply.solved
    ? `closure (${reply.addition_suffices ? "addition suffices" : "needs subtraction"})`
    : "closure stalls";
  showPuzzle(drawGrid(reply.cells, puzzle.cells, title));
}

function plot(trace) {
  const cv = $("chart");
  const g = cv.getContext("2d");
  const W = cv.width, H = cv.height, pad = 30;
  g.clearRect(0, 0, W, H);
  const n = Math.max(trace.length - 1, 1);
  const x = (t) => pad + (t / n) * (W - 2 * pad);
  const y = (v) => H / 2 - v * (H / 2 - pad);

  g.strokeStyle = "#ccc";
  g.beginPath();
  g.moveTo(pad, y(0)); g.lineTo(W - pad, y(0));
  g.stroke();
  g.fillStyle = "#666";
  g.font = "11px sans-serif";
  g.fillText("+1", 4, y(1) + 4);
  g.fillText("0", 4, y(0) + 4);
  g.fillText("-1", 4, y(-1) + 4);

  const colours = { fill: "#2a2", correct: "#d80", change_plan: "#26c", abandon: "#b00", stop_success: "#080" };
  trace.forEach((e) => {
    g.fillStyle = colours[e.action] ?? "#999";
    g.fillRect(x(e.t) - 2, H - pad + 6, 4, 8);
  });

  for (const [key, colour] of [["valence", "#26c"], ["frustration", "#c33"]]) {
    g.strokeStyle = colour;
    g.lineWidth = 2;
    g.beginPath();
    trace.forEach((e, i) => (i ? g.lineTo(x(e.t), y(e[key])) : g.moveTo(x(e.t), y(e[key]))));
    g.stroke();
    g.fillStyle = colour;
    g.fillText(key, W - pad - 70, key === "valence" ? 14 : 28);
  }
}

function onSimulate() {
  if (!puzzle) onGenerate();
  if (!puzzle) return;
  try {
    const reply = JSON.parse(simulate(
      JSON.stringify(puzzle), $("rep").value, +$("pslip").value, +$("theta").value,
      +$("maxc").value, BigInt($("eseed").value)));
    $("summary").textContent =
      `${reply.outcome} in ${reply.steps} steps, ${reply.plan_changes} plan changes, ` +
      `${reply.fills} fills, ${reply.corrections} corrections, ${reply.slips} slips`;
    showPuzzle(drawGrid(reply.final_cells, puzzle.cells, "agent's final grid"));
    plot(reply.trace);
    $("trace").innerHTML = reply.trace.map((e) => JSON.stringify(e)).join("<br>");
  } catch (e) {
    $("summary").innerHTML = `<span class="err">${e.message ?? e}</span>`;
  }
}

await init();
$("gen").onclick = onGenerate;
$("solve").onclick = onSolve;
$("sim").onclick = onSimulate;
onGenerate();
onSimulate();
