// App bootstrap: agent list in the sidebar, one live workspace at a time,
// a single bridge-stream connection routed to the active view.

import { fetchWorkspace, listAgents } from "./api.js";
import { connectStream } from "./stream.js";
import { bindShortcuts, handleBridgeMessage, renderWorkspace, type WorkspaceView } from "./workspace.js";

// Served under /ui by `agentforge serve`, so the engine is same-origin.
const BASE_URL = "";

let activeView: WorkspaceView | null = null;
let unbindShortcuts: (() => void) | null = null;

async function openAgent(name: string): Promise<void> {
  const app = document.getElementById("app");
  if (!app) return;
  const spec = await fetchWorkspace(BASE_URL, name);
  if (unbindShortcuts) {
    unbindShortcuts();
  }
  if (activeView) {
    activeView.foreground = false;
  }
  const view = renderWorkspace(spec, BASE_URL);
  view.foreground = true;
  activeView = view;
  unbindShortcuts = bindShortcuts(view);
  app.replaceChildren(view.root);
  const title = document.getElementById("agent-title");
  if (title) {
    title.textContent = name;
  }
}

async function boot(): Promise<void> {
  const sidebar = document.getElementById("agent-list");
  if (!sidebar) return;
  try {
    const agents = await listAgents(BASE_URL);
    for (const agent of agents) {
      const item = document.createElement("li");
      const button = document.createElement("button");
      button.type = "button";
      button.textContent = agent.name;
      button.title = agent.desc;
      button.addEventListener("click", () => {
        void openAgent(agent.name);
      });
      item.appendChild(button);
      sidebar.appendChild(item);
    }
    if (agents.length > 0 && agents[0]) {
      await openAgent(agents[0].name);
    }
  } catch (error) {
    const app = document.getElementById("app");
    if (app) {
      app.textContent = `Cannot reach the engine: ${String(error)}`;
    }
    return;
  }
  connectStream(BASE_URL, (message) => {
    if (activeView) {
      handleBridgeMessage(activeView, message);
    }
  });
}

void boot();
