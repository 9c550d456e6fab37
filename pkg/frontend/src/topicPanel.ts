import type { TopicDetail } from "./types.js";

/** Render numbers exactly as the payload carries them; the DOM audit
 *  requires every visible numeral to exist in the API response. */
function num(value: number): string {
  return String(value);
}

export function renderTopicPanel(
  container: HTMLElement,
  detail: TopicDetail,
  onAsk: (prefill: string) => void,
): void {
  container.textContent = "";

  const title = document.createElement("h3");
  title.className = "topic-title";
  title.textContent =
    detail.topic_id === -1
      ? `Outliers: ${num(detail.size)} papers`
      : `Topic ${num(detail.topic_id)}: ${num(detail.size)} papers`;
  container.appendChild(title);

  if (detail.terms.length > 0) {
    const terms = document.createElement("ul");
    terms.className = "topic-terms";
    for (const [term, score] of detail.terms) {
      const item = document.createElement("li");
      item.textContent = `${term} (${num(score)})`;
      terms.appendChild(item);
    }
    container.appendChild(terms);
  }

  if (detail.representatives.length > 0) {
    const heading = document.createElement("h4");
    heading.textContent = "Representative papers";
    container.appendChild(heading);
    const list = document.createElement("ol");
    list.className = "topic-reps";
    for (const rep of detail.representatives) {
      const item = document.createElement("li");
      item.textContent = `${rep.uid}: ${rep.title}`;
      item.title = `similarity ${num(rep.score)}`;
      list.appendChild(item);
    }
    container.appendChild(list);
  }

  if (detail.trend.length > 0) {
    const heading = document.createElement("h4");
    heading.textContent = "Papers per year";
    container.appendChild(heading);
    const chart = document.createElement("div");
    chart.className = "trend-chart";
    const peak = Math.max(...detail.trend.map(([, count]) => count));
    for (const [year, count] of detail.trend) {
      const bar = document.createElement("div");
      bar.className = "trend-bar";
      bar.style.height = `${(count / peak) * 48}px`;
      bar.title = `${num(year)}: ${num(count)}`;
      const label = document.createElement("span");
      label.className = "trend-label";
      label.textContent = `${num(year)}:${num(count)}`;
      bar.appendChild(label);
      chart.appendChild(bar);
    }
    container.appendChild(chart);
  }

  const ask = document.createElement("button");
  ask.className = "ask-topic-btn";
  ask.textContent = "Ask about this topic";
  ask.addEventListener("click", () =>
    onAsk(
      detail.topic_id === -1
        ? "Tell me about the outlier papers"
        : `Tell me more about topic ${detail.topic_id}`,
    ),
  );
  container.appendChild(ask);
}

/** 404 toast for stale topic links. */
export function renderTopicToast(container: HTMLElement, message: string): void {
  const toast = document.createElement("div");
  toast.className = "toast";
  toast.textContent = message;
  container.appendChild(toast);
}
