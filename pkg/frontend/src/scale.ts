// Two-sided judgment scale: a slider from "left item 9x more important"
// through equal (1) to "right item 9x more important". Position k >= 0 means
// the left item wins with strength k+1; negative means the right item does.

export const SCALE_MIN = 1 / 9;
export const SCALE_MAX = 9;
export const POSITION_RANGE = 8; // slider runs -8..+8

export function positionToValue(position: number): number {
  if (!Number.isInteger(position) || Math.abs(position) > POSITION_RANGE) {
    throw new RangeError(`slider position out of range: ${position}`);
  }
  return position >= 0 ? position + 1 : 1 / (1 - position);
}

/** Nearest slider position for an arbitrary judgment value (for restoring UI state). */
export function valueToPosition(value: number): number {
  if (!(value > 0) || !Number.isFinite(value)) {
    throw new RangeError(`judgment value must be positive: ${value}`);
  }
  const position = value >= 1 ? Math.round(value) - 1 : -(Math.round(1 / value) - 1);
  return Math.max(-POSITION_RANGE, Math.min(POSITION_RANGE, position));
}

export function isOnScale(value: number): boolean {
  return (
    Number.isFinite(value) &&
    value >= SCALE_MIN - 1e-12 &&
    value <= SCALE_MAX + 1e-12
  );
}

/**
 * Parse keyboard entry: plain numbers ("3", "0.25") and ratios ("1/3").
 * Returns null for anything unusable or off the 1/9..9 scale.
 */
export function parseJudgmentText(text: string): number | null {
  const trimmed = text.trim();
  if (!trimmed) return null;
  let value: number;
  const ratio = trimmed.match(/^(\d+(?:\.\d+)?)\s*\/\s*(\d+(?:\.\d+)?)$/);
  if (ratio) {
    const num = Number(ratio[1]);
    const den = Number(ratio[2]);
    if (!(den > 0)) return null;
    value = num / den;
  } else {
    value = Number(trimmed);
  }
  if (!(value > 0) || !isOnScale(value)) return null;
  return value;
}

export function formatJudgment(value: number): string {
  if (value >= 1) {
    return Number.isInteger(value) ? String(value) : value.toFixed(2);
  }
  const inverse = 1 / value;
  if (Math.abs(inverse - Math.round(inverse)) < 1e-9) {
    return `1/${Math.round(inverse)}`;
  }
  return value.toFixed(3);
}
