import { ApiClient } from "./api.js";
import { App } from "./app.js";
import { LandscapeView } from "./landscape.js";

function mustFind<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) {
    throw new Error(`missing #${id}`);
  }
  return el as T;
}

const canvas = mustFind<HTMLCanvasElement>("scatter");
const ctx = canvas.getContext("2d");
if (!ctx) {
  throw new Error("canvas 2d unavailable");
}

const app = new App(new ApiClient(), {
  transcript: mustFind("transcript"),
  input: mustFind<HTMLInputElement>("chat-input"),
  send: mustFind<HTMLButtonElement>("chat-send"),
  status: mustFind("session-state"),
  legend: mustFind("legend"),
  panel: mustFind("topic-panel"),
  scatter: new LandscapeView(ctx, canvas.width, canvas.height),
  hover: mustFind("hover-label"),
});

canvas.addEventListener("mousemove", (event) => {
  const rect = canvas.getBoundingClientRect();
  app.hover(event.clientX - rect.left, event.clientY - rect.top);
});

void app.start();
