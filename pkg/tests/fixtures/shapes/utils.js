export function clamp(x, lo, hi) {
  return Math.min(hi, Math.max(lo, x));
}

export function sum(values) {
  return values.reduce((a, b) => a + b, 0);
}
