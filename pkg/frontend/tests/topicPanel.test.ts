import { beforeEach, describe, expect, it, vi } from "vitest";

import { auditNumerals } from "../src/audit.js";
import { renderTopicPanel, renderTopicToast } from "../src/topicPanel.js";
import type { TopicDetail } from "../src/types.js";

const DETAIL: TopicDetail = {
  topic_id: 0,
  size: 18,
  terms: [
    ["mental health", 0.91],
    ["screening", 0.4],
  ],
  representatives: [
    { uid: "W007", title: "Screening at scale", score: 0.93 },
    { uid: "W012", title: "Triage pilots", score: 0.88 },
  ],
  trend: [
    [2021, 4],
    [2022, 14],
  ],
};

let panel: HTMLElement;

beforeEach(() => {
  document.body.innerHTML = "";
  panel = document.createElement("div");
  document.body.append(panel);
});

describe("renderTopicPanel", () => {
  it("every numeral on screen comes from the payload", () => {
    renderTopicPanel(panel, DETAIL, () => {});
    expect(auditNumerals(panel, [DETAIL])).toEqual([]);
  });

  it("shows the title, terms, and representatives verbatim", () => {
    renderTopicPanel(panel, DETAIL, () => {});
    expect(panel.querySelector(".topic-title")?.textContent).toBe("Topic 0: 18 papers");
    const terms = [...panel.querySelectorAll(".topic-terms li")].map((li) => li.textContent);
    expect(terms[0]).toContain("mental health");
    const reps = [...panel.querySelectorAll(".topic-reps li")].map((li) => li.textContent);
    expect(reps).toEqual(["W007: Screening at scale", "W012: Triage pilots"]);
  });

  it("trend bars carry year:count labels", () => {
    renderTopicPanel(panel, DETAIL, () => {});
    const labels = [...panel.querySelectorAll(".trend-label")].map((el) => el.textContent);
    expect(labels).toEqual(["2021:4", "2022:14"]);
  });

  it("ask button prefills a question about this topic", () => {
    const onAsk = vi.fn();
    renderTopicPanel(panel, DETAIL, onAsk);
    (panel.querySelector(".ask-topic-btn") as HTMLButtonElement).click();
    expect(onAsk).toHaveBeenCalledWith("Tell me more about topic 0");
  });

  it("renders the outlier pseudo-topic with its own wording", () => {
    const onAsk = vi.fn();
    renderTopicPanel(panel, { ...DETAIL, topic_id: -1, size: 3 }, onAsk);
    expect(panel.querySelector(".topic-title")?.textContent).toBe("Outliers: 3 papers");
    (panel.querySelector(".ask-topic-btn") as HTMLButtonElement).click();
    expect(onAsk).toHaveBeenCalledWith("Tell me about the outlier papers");
  });

  it("re-rendering replaces the previous panel content", () => {
    renderTopicPanel(panel, DETAIL, () => {});
    renderTopicPanel(panel, { ...DETAIL, topic_id: 1 }, () => {});
    expect(panel.querySelectorAll(".topic-title")).toHaveLength(1);
    expect(panel.querySelector(".topic-title")?.textContent).toContain("Topic 1");
  });
});

describe("renderTopicToast", () => {
  it("shows a dismissable notice", () => {
    renderTopicToast(panel, "topic 9 not found");
    const toast = panel.querySelector(".toast");
    expect(toast?.textContent).toContain("topic 9 not found");
  });
});
