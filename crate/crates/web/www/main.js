// Build the wasm package first: wasm-pack build crates/web --target web --out-dir www/pkg
import init, { mul_table, compare_envelope, evaluate } from "./pkg/opcheck_web.js";

const $ = (id) => document.getElementById(id);

function call(fn, ...args) {
  try {
    return { ok: JSON.parse(fn(...args)) };
  } catch (e) {
    return { err: e.message ?? String(e) };
  }
}

function cell(row, text, cls) {
  const td = row.insertCell();
  td.textContent = text;
  if (cls) td.className = cls;
  return td;
}

function renderMul() {
  const variant = document.querySelector("input[name=mul-variant]:checked").value;
  const body = $("mul-table").tBodies[0];
  body.replaceChildren();
  $("mul-detail").textContent = "";
  const r = call(mul_table, Number($("mul-arity").value), variant);
  if (r.err) {
    $("mul-detail").textContent = r.err;
    return;
  }
  for (const row of r.ok.rows) {
    const tr = body.insertRow();
    cell(tr, row.inputs === "" ? "(none)" : row.inputs);
    for (const out of ["a", "m"]) {
      const { count, morphisms } = row[out];
      const td = cell(tr, count, count > 0 ? "hit" : "");
      td.onclick = () => {
        $("mul-detail").textContent = morphisms.length ? morphisms.join("\n") : "no operations";
      };
    }
  }
}

function renderEnvelope() {
  const variant = $("env-literal").checked ? "literal" : "strengthened";
  const r = call(compare_envelope, Number($("env-size").value), Number($("env-shape").value), variant);
  const verdict = $("env-verdict");
  const objects = $("env-objects").tBodies[0];
  objects.replaceChildren();
  if (r.err) {
    verdict.textContent = r.err;
    verdict.className = "verdict fail";
    $("env-witness").textContent = "";
    return;
  }
  const { report } = r.ok;
  const d = report.data;
  verdict.className = `verdict ${report.verdict === "pass" ? "pass" : "fail"}`;
  verdict.textContent =
    `${report.verdict}: Env has ${d.envelope.objects} objects / ${d.envelope.arrows} arrows, ` +
    `tuples of F+ have ${d.fplus.objects} / ${d.fplus.arrows}`;
  $("env-witness").textContent = report.witness ? JSON.stringify(report.witness, null, 2) : "";
  for (const o of r.ok.objects) {
    const tr = objects.insertRow();
    cell(tr, o.envelope);
    cell(tr, o.fplus);
  }
}

function renderEval() {
  const r = call(evaluate, $("eval-algebra").value, $("eval-map").value, $("eval-input").value);
  if (r.err) {
    $("eval-out").textContent = r.err;
    return;
  }
  const o = r.ok;
  if (o.laws.status !== "pass") {
    $("eval-out").textContent = "algebra laws fail:\n" + JSON.stringify(o.laws.witness, null, 2);
    return;
  }
  const fibers = o.fibers.map((f) => `  ${f.target} <- {${f.fiber.join(",")}}`).join("\n");
  $("eval-out").textContent =
    `A(${o.map})(${o.input.join(", ")}) = (${o.output.join(", ")})\n` +
    `fibers:\n${fibers}\n` +
    `functoriality on this truncation: ${o.functoriality.status}`;
}

await init();
$("mul-arity").oninput = renderMul;
for (const el of document.querySelectorAll("input[name=mul-variant]")) el.onchange = renderMul;
$("env-run").onclick = renderEnvelope;
$("env-literal").onchange = renderEnvelope;
$("eval-run").onclick = renderEval;
renderMul();
renderEnvelope();
renderEval();
