import { ServiceClient } from "./api";
import { buildPresets } from "./presets";
import { draw } from "./render";
import { StreamClient } from "./stream";
import { Preset } from "./types";
import { ViewState } from "./view-state";

function el<T extends HTMLElement>(id: string): T {
    const node = document.getElementById(id);
    if (!node) {
        throw new Error(`missing element #${id}`);
    }
    return node as T;
}

const canvas = el<HTMLCanvasElement>("canvas");
const ctx = canvas.getContext("2d")!;
const graphInput = el<HTMLInputElement>("graph-spec");
const serviceInput = el<HTMLInputElement>("service-url");
const createBtn = el<HTMLButtonElement>("create");
const runBtn = el<HTMLButtonElement>("run");
const pauseBtn = el<HTMLButtonElement>("pause");
const slider = el<HTMLInputElement>("s-slider");
const sliderValue = el<HTMLSpanElement>("s-value");
const applyBtn = el<HTMLButtonElement>("apply-s");
const presetBox = el<HTMLDivElement>("presets");
const ackLabel = el<HTMLSpanElement>("ack");
const statusLabel = el<HTMLSpanElement>("connection");

let client = new ServiceClient(serviceInput.value);
let view: ViewState | null = null;
let stream: StreamClient | null = null;

function renderLoop(): void {
    if (view) {
        draw(ctx, view, { width: canvas.width, height: canvas.height });
    }
    requestAnimationFrame(renderLoop);
}
requestAnimationFrame(renderLoop);

async function steer(s: number): Promise<void> {
    if (!view) {
        return;
    }
    try {
        const ack = await client.setParameter(view.sessionId, s);
        ackLabel.textContent = `ack: s=${ack.s} effective t=${ack.effective_t.toFixed(3)} (${ack.roundTripMs.toFixed(0)} ms)`;
    } catch (err) {
        ackLabel.textContent = `rejected: ${String(err)}`;
    }
}

function installPresets(presets: Preset[]): void {
    presetBox.innerHTML = "";
    for (const preset of presets) {
        const btn = document.createElement("button");
        btn.textContent = preset.label;
        btn.onclick = () => void steer(preset.s);
        presetBox.appendChild(btn);
    }
}

async function connectTo(sessionId: string): Promise<void> {
    const snapshot = await client.getSession(sessionId);
    view = new ViewState(snapshot);
    window.location.hash = sessionId;
    stream?.close();
    stream = new StreamClient(
        client.streamUrl(sessionId),
        (frame) => view?.apply(frame),
        (state) => {
            statusLabel.textContent = state;
        },
    );
    await stream.connect();
    try {
        const report = await client.analyze(graphInput.value);
        installPresets(buildPresets(report));
    } catch {
        installPresets(buildPresets(null));
    }
}

createBtn.onclick = async () => {
    client = new ServiceClient(serviceInput.value);
    const spec = graphInput.value;
    const report = await client.analyze(spec).catch(() => null);
    // a small planar spread so the first frame is visible
    const n = Number((/:(\d+)/.exec(spec) ?? [])[1] ?? 6);
    const x0: number[] = [];
    for (let i = 0; i < n; i++) {
        const angle = (2 * Math.PI * i) / n + 0.4;
        x0.push(3 * Math.cos(angle) + 0.3 * i, 3 * Math.sin(angle) - 0.2 * i);
    }
    const snapshot = await client.createSession({
        graph: spec,
        mode: "planar",
        x0,
        dt: 1e-3,
        realtime_factor: 1.0,
    });
    installPresets(buildPresets(report));
    await connectTo(snapshot.id);
};

runBtn.onclick = () => void (view && client.run(view.sessionId));
pauseBtn.onclick = () => void (view && client.pause(view.sessionId));
slider.oninput = () => {
    sliderValue.textContent = Number(slider.value).toFixed(2);
};
applyBtn.onclick = () => void steer(Number(slider.value));

// reconnecting to the session in the URL hash reproduces the live view
// from service state alone
const existing = window.location.hash.replace(/^#/, "");
if (existing) {
    void connectTo(existing).catch(() => {
        statusLabel.textContent = "session gone";
    });
}
