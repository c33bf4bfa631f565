/** Small display formatters shared by the panels. */
const LABEL_NAMES = {
    A: "Aggressive",
    N: "Normal",
    C: "Conservative",
};
export function labelName(label) {
    return LABEL_NAMES[label];
}
export function num(value, digits = 2) {
    if (value === null || value === undefined || !Number.isFinite(value)) {
        return "–";
    }
    return value.toFixed(digits);
}
/** Agreement and ratio displays are fixed to one decimal place. */
export function pct(fraction) {
    if (fraction === null || !Number.isFinite(fraction)) {
        return "–";
    }
    return `${(fraction * 100).toFixed(1)}%`;
}
export function severityClass(severity) {
    return `sev-${Math.min(Math.max(severity, 0), 3)}`;
}
const TREND_NAMES = {
    Accelerating: "accelerating",
    Decelerating: "decelerating",
    AccelThenDecel: "accel, then decel",
    DecelThenAccel: "decel, then accel",
    QuasiConstant: "steady",
};
export function trendName(trend) {
    return TREND_NAMES[trend] ?? trend;
}
