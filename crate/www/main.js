import init, { LoopExplorer, count_curve } from "./pkg/bicolor_web.js";

const $ = (id) => document.getElementById(id);
let explorer = null;
let pendingFace = null;

function flavour() {
  return Number(document.querySelector("input[name=flavour]:checked").value);
}

function say(text) {
  $("message").textContent = text;
}

function draw() {
  $("svg-host").innerHTML = explorer.svg();
  $("status").textContent = explorer.status();
  for (const g of $("svg-host").querySelectorAll(".face")) {
    g.addEventListener("click", () => onFace(Number(g.dataset.face), g));
  }
}

function onFace(face, node) {
  try {
    if ($("pair-mode").checked && $("model").value === "square") {
      if (pendingFace === null) {
        pendingFace = face;
        node.classList.add("selected");
        say(`face ${face} selected, pick a neighbour`);
        return;
      }
      const first = pendingFace;
      pendingFace = null;
      const ok = explorer.pair_move(first, face, flavour());
      say(ok ? "" : `C on (${first}, ${face}) annihilates this configuration`);
    } else {
      const ok = explorer.face_move(face, flavour());
      say(ok ? "" : `X^(${flavour()}) on face ${face} annihilates this configuration`);
    }
  } catch (e) {
    pendingFace = null;
    say(e.message ?? String(e));
  }
  draw();
}

function build(event) {
  event?.preventDefault();
  const model = $("model").value;
  const lx = Number($("lx").value);
  const ly = model === "square" ? lx : Number($("ly").value);
  $("ly").value = ly;
  for (const el of document.querySelectorAll(".square-only")) {
    el.style.display = model === "square" ? "" : "none";
  }
  if (model === "hex" && flavour() === 3) {
    document.querySelector("input[name=flavour][value='1']").checked = true;
  }
  $("moves").value = model === "square" ? "B,C" : "B'";
  try {
    explorer = new LoopExplorer(model, lx, ly);
    say("");
    draw();
  } catch (e) {
    say(e.message ?? String(e));
  }
  $("sector-table").tBodies[0].innerHTML = "";
  $("sector-summary").textContent = "";
}

function sectors() {
  const moves = $("moves").value;
  let data;
  try {
    data = JSON.parse(explorer.sectors(moves));
  } catch (e) {
    say(e.message ?? String(e));
    return;
  }
  $("sector-summary").textContent =
    `${data.total_configs} closed configurations, ${data.num_components} components, ` +
    `${data.distinct_labels} distinct labels; current configuration in component ${data.current}`;
  const body = $("sector-table").tBodies[0];
  body.innerHTML = "";
  for (const c of data.components) {
    const row = body.insertRow();
    if (c.index === data.current) row.className = "current";
    for (const cell of [c.index, c.size, c.frozen, c.label]) row.insertCell().textContent = cell;
    row.addEventListener("click", () => {
      explorer.load_component(moves, c.index);
      draw();
      sectors();
    });
  }
}

function plot(event) {
  event?.preventDefault();
  let rows;
  try {
    rows = JSON.parse(count_curve($("family").value, Number($("lmax").value), $("s").value));
  } catch (e) {
    $("count-summary").textContent = e.message ?? String(e);
    return;
  }
  const W = 560, H = 300, P = 40;
  const xs = rows.map((r) => r.l);
  const ys = rows.flatMap((r) => [r.ln_exact, r.entropy_closed_form]);
  const [x0, x1] = [Math.min(...xs), Math.max(...xs)];
  const [y0, y1] = [Math.min(...ys), Math.max(...ys)];
  const sx = (x) => P + ((x - x0) / Math.max(1, x1 - x0)) * (W - 2 * P);
  const sy = (y) => H - P - ((y - y0) / Math.max(1e-9, y1 - y0)) * (H - 2 * P);
  const path = (key) => rows.map((r, i) => `${i ? "L" : "M"}${sx(r.l).toFixed(1)},${sy(r[key]).toFixed(1)}`).join("");
  $("plot-host").innerHTML =
    `<svg class="plot" viewBox="0 0 ${W} ${H}">` +
    `<line x1="${P}" y1="${H - P}" x2="${W - P}" y2="${H - P}" stroke="#999"/>` +
    `<line x1="${P}" y1="${P}" x2="${P}" y2="${H - P}" stroke="#999"/>` +
    `<path class="exact" d="${path("ln_exact")}"/>` +
    `<path class="bound" d="${path("entropy_closed_form")}"/>` +
    `<text x="${W - P}" y="${H - P + 16}" text-anchor="end">l = ${x1}</text>` +
    `<text x="${P}" y="${H - P + 16}">l = ${x0}</text>` +
    `<text x="${P + 4}" y="${P - 6}">ln N (solid), entropy closed form (dashed), ${y0.toFixed(2)} to ${y1.toFixed(2)}</text>` +
    `</svg>`;
  const last = rows[rows.length - 1];
  const ratio = last.ratio === null ? "n/a" : last.ratio.toFixed(5);
  const digits = last.exact.length > 40 ? `${last.exact.slice(0, 20)}… (${last.exact.length} digits)` : last.exact;
  $("count-summary").textContent = `l = ${last.l}: exact ${digits}, exact/asymptotic ${ratio}`;
}

await init();
$("lattice-form").addEventListener("submit", build);
$("reset").addEventListener("click", () => {
  explorer.reset();
  say("");
  draw();
});
$("sectors").addEventListener("click", sectors);
$("count-form").addEventListener("submit", plot);
build();
plot();
