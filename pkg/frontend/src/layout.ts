/** Deterministic force-directed layout: spring forces along edges,
 * pairwise repulsion between nodes, fixed iteration count. Small
 * graphs settle visibly; determinism keeps tests stable. */

export interface LayoutNode {
  id: string;
  x: number;
  y: number;
}

export interface LayoutEdge {
  src: string;
  dst: string;
}

const ITERATIONS = 120;
const SPRING_LENGTH = 90;
const SPRING_K = 0.02;
const REPULSION = 4000;
const DAMPING = 0.85;

export function forceLayout(ids: string[], edges: LayoutEdge[], width = 800, height = 600): LayoutNode[] {
  // Seed positions on a circle (deterministic, no RNG).
  const nodes: LayoutNode[] = ids.map((id, i) => {
    const theta = (2 * Math.PI * i) / Math.max(ids.length, 1);
    return { id, x: width / 2 + 150 * Math.cos(theta), y: height / 2 + 150 * Math.sin(theta) };
  });
  const index = new Map(nodes.map((n, i) => [n.id, i]));
  const vx = new Float64Array(nodes.length);
  const vy = new Float64Array(nodes.length);

  for (let step = 0; step < ITERATIONS; step++) {
    for (let i = 0; i < nodes.length; i++) {
      for (let j = i + 1; j < nodes.length; j++) {
        let dx = nodes[i].x - nodes[j].x;
        let dy = nodes[i].y - nodes[j].y;
        const distSq = Math.max(dx * dx + dy * dy, 1);
        const force = REPULSION / distSq;
        const dist = Math.sqrt(distSq);
        dx /= dist;
        dy /= dist;
        vx[i] += dx * force;
        vy[i] += dy * force;
        vx[j] -= dx * force;
        vy[j] -= dy * force;
      }
    }
    for (const edge of edges) {
      const a = index.get(edge.src);
      const b = index.get(edge.dst);
      if (a === undefined || b === undefined) continue;
      const dx = nodes[b].x - nodes[a].x;
      const dy = nodes[b].y - nodes[a].y;
      const dist = Math.max(Math.hypot(dx, dy), 1);
      const force = SPRING_K * (dist - SPRING_LENGTH);
      vx[a] += (dx / dist) * force;
      vy[a] += (dy / dist) * force;
      vx[b] -= (dx / dist) * force;
      vy[b] -= (dy / dist) * force;
    }
    for (let i = 0; i < nodes.length; i++) {
      vx[i] *= DAMPING;
      vy[i] *= DAMPING;
      nodes[i].x = Math.min(width, Math.max(0, nodes[i].x + vx[i]));
      nodes[i].y = Math.min(height, Math.max(0, nodes[i].y + vy[i]));
    }
  }
  return nodes;
}
