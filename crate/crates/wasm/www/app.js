import init, { packing_disk, net_disk, bunched_search } from "./pkg/hypack_wasm.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function frame(canvas) {
  const ctx = canvas.getContext("2d");
  const s = canvas.width / 2 - 4;
  ctx.setTransform(1, 0, 0, 1, 0, 0);
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.setTransform(s, 0, 0, -s, canvas.width / 2, canvas.height / 2);
  ctx.lineWidth = 1 / s;
  ctx.strokeStyle = "#999";
  ctx.beginPath();
  ctx.arc(0, 0, 1, 0, 2 * Math.PI);
  ctx.stroke();
  return ctx;
}

function circle(ctx, [x, y, r], stroke, fill) {
  ctx.beginPath();
  ctx.arc(x, y, Math.max(r, 0), 0, 2 * Math.PI);
  if (fill) { ctx.fillStyle = fill; ctx.fill(); }
  ctx.strokeStyle = stroke;
  ctx.stroke();
}

function dot(ctx, [x, y], color) {
  ctx.fillStyle = color;
  ctx.beginPath();
  ctx.arc(x, y, ctx.lineWidth * 2.5, 0, 2 * Math.PI);
  ctx.fill();
}

function guarded(out, f) {
  try {
    out.classList.remove("err");
    f();
  } catch (e) {
    out.classList.add("err");
    out.textContent = String(e);
  }
}

function drawPacking() {
  guarded($("pack-out"), () => {
    const v = JSON.parse(packing_disk(num("pack-c"), num("pack-r"), num("pack-cap")));
    const ctx = frame($("pack-canvas"));
    circle(ctx, v.enclosing, "#2a6");
    for (const c of v.circles) circle(ctx, c, "#246", "rgba(40,90,160,.15)");
    $("pack-out").textContent =
      `alpha = ${v.alpha.toFixed(6)}\nfamily size = ${v.family_size}\nshown = ${v.shown}`;
  });
}

let base = [0.4, 0.3];
function drawNet() {
  guarded($("net-out"), () => {
    const v = JSON.parse(net_disk(num("net-rho"), num("net-delta"), base[0], base[1]));
    const ctx = frame($("net-canvas"));
    circle(ctx, v.ball, "#2a6", "rgba(40,160,90,.1)");
    for (const p of v.points) dot(ctx, p, "#a33");
    $("net-out").textContent = `net size = ${v.size}\nbase = (${base[0].toFixed(3)}, ${base[1].toFixed(3)})`;
  });
}

function drawSearch() {
  const out = $("search-out");
  out.textContent = "searching...";
  setTimeout(() => guarded(out, () => {
    const v = JSON.parse(bunched_search(num("search-r"), num("search-eps"), num("search-k"), $("search-h").checked));
    const ctx = frame($("search-canvas"));
    for (const b of v.balls) circle(ctx, b, "#246", "rgba(40,90,160,.25)");
    for (const p of v.images) dot(ctx, p, "#a33");
    out.textContent = [
      `C = ${v.C}, R used = ${v.R_used}`,
      `min d(p_i, p_j) - 2r = ${v.separation.toFixed(4)}`,
      `image set distance = ${v.set_distance.toFixed(5)}`,
      `Hausdorff estimate + slack = ${v.hausdorff.toFixed(5)}`,
      `certificate: ${v.pass ? "pass" : "FAIL"}`,
    ].join("\n");
  }), 0);
}

await init();
for (const [form, draw] of [["pack-form", drawPacking], ["net-form", drawNet], ["search-form", drawSearch]]) {
  $(form).addEventListener("submit", (e) => { e.preventDefault(); draw(); });
}
$("net-canvas").addEventListener("click", (e) => {
  const c = e.target;
  const s = c.width / 2 - 4;
  const x = (e.offsetX - c.width / 2) / s;
  const y = -(e.offsetY - c.height / 2) / s;
  if (Math.hypot(x, y) < 0.999) { base = [x, y]; drawNet(); }
});
drawPacking();
drawNet();
drawSearch();
