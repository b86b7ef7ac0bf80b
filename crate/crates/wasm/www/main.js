import init, { focusSummary, axisProfile, planeMap } from "./pkg/nanolens_wasm.js";

const OUTER_NM = 60;
const MAP_N = 61;
const MAP_WINDOW_NM = 20;
const PROFILE = { from: 5, to: 60, n: 111 };

const $ = (id) => document.getElementById(id);
const status = $("status");

function lens() {
  return [Number($("bias").value), OUTER_NM, Number($("inner").value), Number($("thickness").value)];
}

function color(t) {
  const s = Math.max(0, Math.min(1, t));
  const r = Math.round(255 * Math.min(1, 1.8 * s));
  const g = Math.round(255 * Math.max(0, Math.min(1, 1.8 * s - 0.4)));
  const b = Math.round(255 * Math.max(0, 0.6 - s) + 90 * s * s);
  return [r, g, b];
}

function drawMap(data) {
  const canvas = $("map");
  const ctx = canvas.getContext("2d");
  const { n, bmag_gauss: mags, window_nm: w } = data;
  const lo = Math.log(data.range_gauss[0]);
  const hi = Math.log(data.range_gauss[1]);
  const img = ctx.createImageData(n, n);
  for (let j = 0; j < n; j++) {
    for (let i = 0; i < n; i++) {
      const [r, g, b] = color((Math.log(mags[j * n + i]) - lo) / (hi - lo));
      const k = 4 * ((n - 1 - j) * n + i);
      img.data.set([r, g, b, 255], k);
    }
  }
  const off = new OffscreenCanvas(n, n);
  off.getContext("2d").putImageData(img, 0, 0);
  ctx.imageSmoothingEnabled = true;
  ctx.drawImage(off, 0, 0, canvas.width, canvas.height);

  const px = (u) => ((u + w / 2) / w) * canvas.width;
  const py = (v) => canvas.height - ((v + w / 2) / w) * canvas.height;
  ctx.strokeStyle = "rgba(255,255,255,0.8)";
  ctx.lineWidth = 1;
  for (const c of data.contours) {
    for (const line of c.polylines) {
      ctx.beginPath();
      line.forEach(([u, v], k) => (k ? ctx.lineTo(px(u), py(v)) : ctx.moveTo(px(u), py(v))));
      ctx.stroke();
    }
  }
  if (data.classification) {
    ctx.fillStyle = "#fff";
    ctx.beginPath();
    ctx.arc(px(0), py(0), 3, 0, 2 * Math.PI);
    ctx.fill();
  }
}

function drawProfile(values, focusZ) {
  const canvas = $("profile");
  const ctx = canvas.getContext("2d");
  const pad = 36;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const lo = Math.min(...values);
  const hi = Math.max(...values);
  const x = (z) => pad + ((z - PROFILE.from) / (PROFILE.to - PROFILE.from)) * (canvas.width - 2 * pad);
  const y = (b) => canvas.height - pad - ((b - lo) / (hi - lo || 1)) * (canvas.height - 2 * pad);
  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, pad, canvas.width - 2 * pad, canvas.height - 2 * pad);
  ctx.fillStyle = "#444";
  ctx.fillText(`${hi.toFixed(0)} G`, 2, pad + 4);
  ctx.fillText(`${lo.toFixed(1)} G`, 2, canvas.height - pad);
  ctx.fillText(`${PROFILE.from} nm`, pad, canvas.height - pad + 14);
  ctx.fillText(`${PROFILE.to} nm`, canvas.width - pad - 24, canvas.height - pad + 14);
  ctx.strokeStyle = "#c33";
  ctx.beginPath();
  values.forEach((b, i) => {
    const z = PROFILE.from + ((PROFILE.to - PROFILE.from) * i) / (PROFILE.n - 1);
    i ? ctx.lineTo(x(z), y(b)) : ctx.moveTo(x(z), y(b));
  });
  ctx.stroke();
  if (focusZ !== null) {
    ctx.strokeStyle = "#36c";
    ctx.setLineDash([4, 3]);
    ctx.beginPath();
    ctx.moveTo(x(focusZ), pad);
    ctx.lineTo(x(focusZ), canvas.height - pad);
    ctx.stroke();
    ctx.setLineDash([]);
  }
}

function showSummary(s) {
  const f = s.focus;
  const rows = [
    ["classification", f.classification],
    ["focus height", `${f.z_nm.toFixed(3)} nm`],
    ["|B| at focus", `${f.bmin_gauss.toFixed(3)} G`],
    ["tensor eigenvalues", s.tensor.eigenvalues_gauss_per_angstrom.map((v) => v.toFixed(3)).join(", ") + " G/Å"],
  ];
  const sel = s.selectivity;
  if (sel) {
    rows.push(["proton frequency", `${sel.focus_frequency_khz.toFixed(2)} kHz`]);
    for (const axis of ["p45", "m45", "z"]) {
      rows.push([`1 G shell along ${axis}`, `${sel.axes[axis].extent_nm.toFixed(3)} nm`]);
    }
  }
  $("summary").innerHTML = rows.map(([k, v]) => `<tr><th>${k}</th><td>${v}</td></tr>`).join("");
}

function update() {
  for (const id of ["bias", "thickness", "inner", "spacing"]) {
    $(`${id}-out`).textContent = $(id).value;
  }
  $("spacing-label").textContent = $("spacing").value;
  status.className = "";
  status.textContent = "computing…";
  requestAnimationFrame(() =>
    setTimeout(() => {
      const t0 = performance.now();
      try {
        const args = lens();
        const summary = JSON.parse(focusSummary(...args));
        showSummary(summary);
        drawProfile(axisProfile(...args, PROFILE.from, PROFILE.to, PROFILE.n), summary.focus.z_nm);
        drawMap(JSON.parse(planeMap(...args, $("plane").value, MAP_WINDOW_NM, MAP_N, Number($("spacing").value))));
        status.textContent = `updated in ${(performance.now() - t0).toFixed(0)} ms`;
      } catch (e) {
        status.className = "error";
        status.textContent = e.message ?? String(e);
      }
    }, 0),
  );
}

await init();
for (const id of ["bias", "thickness", "inner", "spacing", "plane"]) {
  $(id).addEventListener("change", update);
}
for (const id of ["bias", "thickness", "inner", "spacing"]) {
  $(id).addEventListener("input", () => ($(`${id}-out`).textContent = $(id).value));
}
update();
