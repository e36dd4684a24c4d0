import init, { delayedRow, heatmap, runProgram, parseAngle } from "./pkg/cheshire_web.js";

const TAU = 2 * Math.PI;
const GRID = 121;
const COMPONENTS = ["xL", "xR", "zL", "zR"];

const $ = (id) => document.getElementById(id);
const fmt = (x) => (x === null || x === undefined ? "" : x.toFixed(6));

function wrap(a) {
  return ((a % TAU) + TAU) % TAU;
}

function renderRow() {
  const theta = Number($("theta").value);
  const phi = Number($("phi").value);
  const body = $("row").tBodies[0];
  const status = $("row-status");
  body.replaceChildren();
  status.className = "";
  let row;
  try {
    row = JSON.parse(delayedRow(theta, phi, $("method").value, Number($("g").value)));
  } catch (e) {
    status.textContent = e.message ?? String(e);
    status.className = "error";
    return;
  }
  for (const o of COMPONENTS) {
    const tr = body.insertRow();
    const re = row[`${o}_re`];
    const im = row[`${o}_im`];
    if (re !== null && Math.hypot(Math.abs(re) - 1, im) < 1e-3) tr.className = "unit";
    tr.insertCell().textContent = o;
    tr.insertCell().textContent = fmt(re);
    tr.insertCell().textContent = fmt(im);
  }
  status.textContent =
    row.flag === "ok"
      ? `postselection probability ${row.prob.toFixed(4)}`
      : `${row.flag}: pre- and postselected states are orthogonal here`;
}

function setAngle(which, value) {
  $(which).value = wrap(value);
  $(`${which}-text`).value = wrap(value).toFixed(4);
}

function bindAngle(which) {
  $(which).addEventListener("input", () => {
    $(`${which}-text`).value = Number($(which).value).toFixed(4);
    renderRow();
  });
  $(`${which}-text`).addEventListener("change", () => {
    const box = $(`${which}-text`);
    try {
      setAngle(which, parseAngle(box.value));
      box.classList.remove("error");
      renderRow();
    } catch (e) {
      box.classList.add("error");
      box.title = e.message ?? String(e);
    }
  });
}

// blue (negative) - white - red (positive)
function colour(v, clip) {
  if (Number.isNaN(v)) return [150, 150, 150];
  const t = Math.max(-1, Math.min(1, v / clip));
  const a = Math.round(255 * (1 - Math.abs(t)));
  return t >= 0 ? [255, a, a] : [a, a, 255];
}

let mapValues = null;

function renderMap() {
  const part = $("map-part").value;
  mapValues = heatmap($("map-observable").value, part, GRID);
  const clip = part === "arg" ? Math.PI : Math.max(0.1, Number($("map-clip").value));
  const canvas = $("heatmap");
  const ctx = canvas.getContext("2d");
  const img = ctx.createImageData(GRID, GRID);
  for (let i = 0; i < GRID; i++) {
    for (let j = 0; j < GRID; j++) {
      const [r, g, b] = colour(mapValues[i * GRID + j], clip);
      const p = 4 * (i * GRID + j);
      img.data.set([r, g, b, 255], p);
    }
  }
  const off = new OffscreenCanvas(GRID, GRID);
  off.getContext("2d").putImageData(img, 0, 0);
  ctx.imageSmoothingEnabled = false;
  ctx.drawImage(off, 0, 0, canvas.width, canvas.height);
}

function cellAt(event) {
  const rect = $("heatmap").getBoundingClientRect();
  const j = Math.min(GRID - 1, Math.floor(((event.clientX - rect.left) / rect.width) * GRID));
  const i = Math.min(GRID - 1, Math.floor(((event.clientY - rect.top) / rect.height) * GRID));
  return { i, j, theta: (TAU * i) / (GRID - 1), phi: (TAU * j) / (GRID - 1) };
}

function runSource() {
  const body = $("records").tBodies[0];
  body.replaceChildren();
  $("program-error").textContent = "";
  let records;
  try {
    records = JSON.parse(runProgram($("source").value));
  } catch (e) {
    $("program-error").textContent = e.message ?? String(e);
    return;
  }
  for (const r of records) {
    const tr = body.insertRow();
    for (const v of [r.line, r.observable, r.method]) tr.insertCell().textContent = v;
    for (const v of [r.value_re, r.value_im, r.stderr]) tr.insertCell().textContent = fmt(v);
    tr.insertCell().textContent = r.flag;
  }
}

await init();

bindAngle("theta");
bindAngle("phi");
for (const id of ["method", "g"]) $(id).addEventListener("change", renderRow);
for (const id of ["map-observable", "map-part", "map-clip"]) $(id).addEventListener("change", renderMap);

$("heatmap").addEventListener("mousemove", (e) => {
  if (!mapValues) return;
  const { i, j, theta, phi } = cellAt(e);
  const v = mapValues[i * GRID + j];
  $("map-hover").textContent =
    `θ = ${theta.toFixed(3)}, φ = ${phi.toFixed(3)}: ` + (Number.isNaN(v) ? "pole" : v.toFixed(4));
});
$("heatmap").addEventListener("click", (e) => {
  const { theta, phi } = cellAt(e);
  setAngle("theta", theta);
  setAngle("phi", phi);
  renderRow();
});
$("run").addEventListener("click", runSource);

renderRow();
renderMap();
runSource();
