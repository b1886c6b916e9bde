/** 3D threat landscape: a city-skyline of bars where height encodes
 * each cell's maximum risk score and color encodes the attack surface.
 * Without a WebGL context (headless, old hardware) the same data
 * renders as a 2D bar table, so the view is always testable. */

import type { ApiClient } from "../api.js";
import { fmtScore } from "../format.js";
import type { LandscapeProjection } from "../types.js";
import { clear, el, errorBanner } from "../ui.js";

export const SURFACE_CSS: Record<string, string> = {
  blue: "#3366cc",
  green: "#2e8b57",
  red: "#cc3333",
  amber: "#e6a817",
};

const BAR_SCALE_PX = 12; // pixels per score unit in the 2D fallback

export function webglAvailable(): boolean {
  try {
    const canvas = document.createElement("canvas");
    return canvas.getContext("webgl2") !== null || canvas.getContext("webgl") !== null;
  } catch {
    return false;
  }
}

export function renderLandscapeFallback(container: HTMLElement, projection: LandscapeProjection): void {
  clear(container);
  container.appendChild(el("div", "fallback-note", "2D fallback view (no 3D context)"));
  const table = el("table", "landscape");
  for (const row of projection.grid) {
    const tr = el("tr");
    for (const cell of row) {
      const td = el("td", "landscape-cell");
      if (cell.height > 0) {
        const bar = el("div", "landscape-bar");
        bar.style.height = `${cell.height * BAR_SCALE_PX}px`;
        bar.style.backgroundColor = SURFACE_CSS[cell.surface_color];
        bar.dataset.height = fmtScore(cell.height);
        bar.dataset.surfaceColor = cell.surface_color;
        bar.title = fmtScore(cell.height);
        td.appendChild(bar);
      }
      tr.appendChild(td);
    }
    table.appendChild(tr);
  }
  container.appendChild(table);
}

async function renderLandscape3d(container: HTMLElement, projection: LandscapeProjection): Promise<void> {
  const three = await import("three");
  clear(container);
  const width = container.clientWidth || 960;
  const height = 540;
  const scene = new three.Scene();
  const camera = new three.PerspectiveCamera(55, width / height, 0.1, 500);
  camera.position.set(14, 18, 26);
  camera.lookAt(8, 0, 2);

  scene.add(new three.AmbientLight(0xffffff, 0.7));
  const sun = new three.DirectionalLight(0xffffff, 1.2);
  sun.position.set(10, 30, 20);
  scene.add(sun);

  projection.grid.forEach((row, surfaceIdx) => {
    row.forEach((cell, categoryIdx) => {
      if (cell.height <= 0) return; // empty cells draw no bar
      const bar = new three.Mesh(
        new three.BoxGeometry(0.8, cell.height, 0.8),
        new three.MeshLambertMaterial({ color: SURFACE_CSS[cell.surface_color] }),
      );
      bar.position.set(categoryIdx, cell.height / 2, surfaceIdx * 2);
      scene.add(bar);
    });
  });

  const renderer = new three.WebGLRenderer({ antialias: true });
  renderer.setSize(width, height);
  container.appendChild(renderer.domElement);

  let dragging = false;
  let angle = 0.6;
  let radius = 32;
  const draw = () => {
    camera.position.set(8 + radius * Math.cos(angle), 18, 2 + radius * Math.sin(angle));
    camera.lookAt(8, 2, 2);
    renderer.render(scene, camera);
  };
  renderer.domElement.addEventListener("pointerdown", () => (dragging = true));
  renderer.domElement.addEventListener("pointerup", () => (dragging = false));
  renderer.domElement.addEventListener("pointermove", (event) => {
    if (dragging) {
      angle += event.movementX * 0.01;
      draw();
    }
  });
  renderer.domElement.addEventListener("wheel", (event) => {
    radius = Math.min(80, Math.max(10, radius + event.deltaY * 0.05));
    draw();
  });
  draw();
}

export async function landscapeView(container: HTMLElement, api: ApiClient): Promise<void> {
  try {
    const projection = await api.landscape();
    if (webglAvailable()) {
      await renderLandscape3d(container, projection);
    } else {
      renderLandscapeFallback(container, projection);
    }
  } catch (err) {
    const stale = container.querySelector(".landscape, canvas") !== null;
    errorBanner(container, `failed to load landscape: ${(err as Error).message}`, stale);
  }
}
