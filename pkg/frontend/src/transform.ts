import { Point } from "./types";

export interface Viewport {
    width: number;
    height: number;
    marginPx?: number;
}

export interface Transform {
    scale: number;
    offsetX: number;
    offsetY: number;
}

/**
 * World-to-screen transform fitting all points (plus the origin, so the
 * origin marker is always visible) into the viewport, preserving aspect
 * ratio and flipping y so world-up is screen-up.
 */
export function fitTransform(points: Point[], vp: Viewport): Transform {
    const margin = vp.marginPx ?? 24;
    let minX = 0;
    let maxX = 0;
    let minY = 0;
    let maxY = 0;
    for (const p of points) {
        minX = Math.min(minX, p.x);
        maxX = Math.max(maxX, p.x);
        minY = Math.min(minY, p.y);
        maxY = Math.max(maxY, p.y);
    }
    const spanX = Math.max(maxX - minX, 1e-9);
    const spanY = Math.max(maxY - minY, 1e-9);
    const usableW = Math.max(vp.width - 2 * margin, 1);
    const usableH = Math.max(vp.height - 2 * margin, 1);
    const scale = Math.min(usableW / spanX, usableH / spanY);
    const centerX = 0.5 * (minX + maxX);
    const centerY = 0.5 * (minY + maxY);
    return {
        scale,
        offsetX: vp.width / 2 - scale * centerX,
        offsetY: vp.height / 2 + scale * centerY,
    };
}

export function worldToScreen(p: Point, t: Transform): Point {
    return { x: t.scale * p.x + t.offsetX, y: -t.scale * p.y + t.offsetY };
}
