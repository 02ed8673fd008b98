import { fitTransform, Viewport, worldToScreen } from "./transform";
import { Point } from "./types";
import { ViewState } from "./view-state";

const AGENT_COLORS = [
    "#e6194b", "#3cb44b", "#4363d8", "#f58231", "#911eb4",
    "#46f0f0", "#f032e6", "#bcf60c", "#008080", "#9a6324",
];

export function draw(ctx: CanvasRenderingContext2D, view: ViewState, vp: Viewport): void {
    ctx.clearRect(0, 0, vp.width, vp.height);
    if (!view.latest) {
        return;
    }
    const everything: Point[] = view.trail.flatMap((s) => s.positions);
    const t = fitTransform(everything, vp);

    // origin marker
    const origin = worldToScreen({ x: 0, y: 0 }, t);
    ctx.strokeStyle = "#888";
    ctx.lineWidth = 1;
    ctx.beginPath();
    ctx.moveTo(origin.x - 8, origin.y);
    ctx.lineTo(origin.x + 8, origin.y);
    ctx.moveTo(origin.x, origin.y - 8);
    ctx.lineTo(origin.x, origin.y + 8);
    ctx.stroke();

    const agents = view.latest.positions.length;
    for (let a = 0; a < agents; a++) {
        const color = AGENT_COLORS[a % AGENT_COLORS.length];
        ctx.strokeStyle = color;
        ctx.globalAlpha = 0.45;
        ctx.beginPath();
        view.trail.forEach((snap, i) => {
            const p = worldToScreen(snap.positions[a], t);
            if (i === 0) {
                ctx.moveTo(p.x, p.y);
            } else {
                ctx.lineTo(p.x, p.y);
            }
        });
        ctx.stroke();
        ctx.globalAlpha = 1.0;

        const head = worldToScreen(view.latest.positions[a], t);
        ctx.fillStyle = color;
        ctx.beginPath();
        ctx.arc(head.x, head.y, 5, 0, 2 * Math.PI);
        ctx.fill();
    }

    // switch-time stars on the trail
    ctx.fillStyle = "#222";
    for (const mark of view.switchMarks) {
        for (const pos of mark.positions) {
            drawStar(ctx, worldToScreen(pos, t), 6);
        }
    }

    ctx.fillStyle = "#111";
    ctx.font = "13px monospace";
    ctx.fillText(
        `t=${view.latest.t.toFixed(2)}  s=${view.ackedS.toPrecision(6)}  ${view.status}`,
        10,
        18,
    );
    if (view.banner) {
        ctx.fillStyle = view.status === "diverged" ? "#b00020" : "#00529b";
        ctx.fillText(view.banner, 10, 36);
    }
}

function drawStar(ctx: CanvasRenderingContext2D, at: Point, r: number): void {
    ctx.beginPath();
    for (let k = 0; k < 10; k++) {
        const radius = k % 2 === 0 ? r : r / 2.4;
        const angle = (Math.PI / 5) * k - Math.PI / 2;
        const x = at.x + radius * Math.cos(angle);
        const y = at.y + radius * Math.sin(angle);
        if (k === 0) {
            ctx.moveTo(x, y);
        } else {
            ctx.lineTo(x, y);
        }
    }
    ctx.closePath();
    ctx.fill();
}
