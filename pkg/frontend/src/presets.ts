import { AnalysisReport, Preset } from "./types";

/** The only values the console is allowed to know without asking the service. */
export const BUILTIN_PRESETS: Preset[] = [
    { label: "s = -1 (bipartite split)", s: -1 },
    { label: "s = 0 (decay to origin)", s: 0 },
    { label: "s = 1 (average consensus)", s: 1 },
];

/** Builtins first, then the service's marginal values, deduplicated by s. */
export function buildPresets(report: AnalysisReport | null): Preset[] {
    const presets = [...BUILTIN_PRESETS];
    if (report) {
        const fromService =
            report.presets ??
            report.marginal.map((m) => ({
                label: `${m.kind} (s=${formatS(m.s)})`,
                s: m.s,
            }));
        for (const preset of fromService) {
            if (!presets.some((p) => Math.abs(p.s - preset.s) < 1e-9)) {
                presets.push(preset);
            }
        }
    }
    return presets;
}

function formatS(s: number): string {
    return Math.abs(s - Math.round(s)) < 1e-9 ? String(Math.round(s)) : s.toPrecision(5);
}
