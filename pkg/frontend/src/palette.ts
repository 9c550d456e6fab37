// Categorical topic colors; outliers are always light gray.

export const TOPIC_COLORS = [
  "#4e79a7",
  "#f28e2b",
  "#59a14f",
  "#e15759",
  "#b07aa1",
  "#76b7b2",
  "#edc948",
  "#ff9da7",
  "#9c755f",
  "#bab0ac",
] as const;

export const OUTLIER_COLOR = "#cccccc";

export function colorFor(topic: number): string {
  if (topic === -1) {
    return OUTLIER_COLOR;
  }
  return TOPIC_COLORS[topic % TOPIC_COLORS.length] as string;
}
