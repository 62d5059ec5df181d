// Renders a WorkspaceSpec into live DOM and wires actions, bridge events,
// and keyboard shortcuts to the engine.

import { runAgent, postEvent, ApiError } from "./api.js";
import { chordFromKeyboardEvent, encodeKeyChord, shouldIgnoreKeyboardShortcut } from "./chord.js";
import type {
  ActionButtonSpec,
  BridgeMessage,
  KeyBindingSpec,
  WorkspaceComponentSpec,
  WorkspaceSpec,
} from "./types.js";

export interface WorkspaceView {
  agent: string;
  baseUrl: string;
  root: HTMLElement;
  sessionId: string | null;
  /** present_only key bindings fire only while their workspace is foregrounded */
  foreground: boolean;
  running: boolean;
  bindings: KeyBindingSpec[];
  display: HTMLTextAreaElement | null;
  chatlist: HTMLUListElement | null;
  richarea: HTMLDivElement | null;
  richMode: "render" | "editor";
  richSwitchEvent: string | null;
  input: HTMLTextAreaElement | null;
  banner: HTMLDivElement;
  messageLog: HTMLUListElement;
  boundButtons: Map<string, HTMLButtonElement[]>;
  /** last text sent to the clipboard (also kept when the API is unavailable) */
  lastCopied: string;
}

export function renderWorkspace(
  spec: WorkspaceSpec,
  baseUrl: string,
  doc: Document = document,
): WorkspaceView {
  const root = doc.createElement("div");
  root.className = "workspace";
  root.dataset.agent = spec.agent;

  const banner = doc.createElement("div");
  banner.className = "banner";
  banner.hidden = true;

  const messageLog = doc.createElement("ul");
  messageLog.className = "message-log";

  const view: WorkspaceView = {
    agent: spec.agent,
    baseUrl,
    root,
    sessionId: null,
    foreground: true,
    running: false,
    bindings: spec.bindings ?? [],
    display: null,
    chatlist: null,
    richarea: null,
    richMode: "render",
    richSwitchEvent: null,
    input: null,
    banner,
    messageLog,
    boundButtons: new Map(),
    lastCopied: "",
  };

  root.appendChild(banner);
  for (const component of spec.components) {
    root.appendChild(renderComponent(view, component, doc));
  }
  root.appendChild(messageLog);
  return view;
}

function renderComponent(
  view: WorkspaceView,
  component: WorkspaceComponentSpec,
  doc: Document,
): HTMLElement {
  switch (component.kind) {
    case "toolbar":
    case "actions": {
      const bar = doc.createElement("div");
      bar.className = component.kind;
      for (const action of component.actions ?? []) {
        bar.appendChild(renderButton(view, action, doc));
      }
      return bar;
    }
    case "textarea": {
      const area = doc.createElement("textarea");
      area.className = "display-area";
      area.readOnly = true;
      view.display = area;
      return area;
    }
    case "chatlist": {
      const list = doc.createElement("ul");
      list.className = "chatlist";
      view.chatlist = list;
      return list;
    }
    case "richarea": {
      const rich = doc.createElement("div");
      rich.className = "richarea";
      view.richarea = rich;
      view.richMode = component.mode === "editor" ? "editor" : "render";
      view.richSwitchEvent = component.switch_event ?? null;
      rich.dataset.mode = view.richMode;
      return rich;
    }
    case "inputarea": {
      const input = doc.createElement("textarea");
      input.className = "input-area";
      input.placeholder = "Type input…";
      view.input = input;
      return input;
    }
    default: {
      // Forward compatibility: unknown kinds render as placeholders.
      console.warn(`[workspace] unknown component kind "${component.kind}"`);
      const placeholder = doc.createElement("div");
      placeholder.className = "placeholder";
      placeholder.textContent = `unsupported component "${component.kind}"`;
      return placeholder;
    }
  }
}

function renderButton(
  view: WorkspaceView,
  action: ActionButtonSpec,
  doc: Document,
): HTMLButtonElement {
  const button = doc.createElement("button");
  button.type = "button";
  button.textContent = action.desc ?? action.preset ?? action.icon ?? "run";
  if (action.preset) {
    button.dataset.preset = action.preset;
  }
  if (action.bind) {
    button.dataset.bind = action.bind;
    const peers = view.boundButtons.get(action.bind) ?? [];
    peers.push(button);
    view.boundButtons.set(action.bind, peers);
  }
  button.addEventListener("click", () => {
    void dispatchAction(view, action);
  });
  return button;
}

function showBanner(view: WorkspaceView, text: string): void {
  view.banner.textContent = text;
  view.banner.hidden = false;
}

function clearBanner(view: WorkspaceView): void {
  view.banner.textContent = "";
  view.banner.hidden = true;
}

function displayText(view: WorkspaceView): string {
  if (view.display) return view.display.value;
  if (view.richarea) return view.richarea.dataset.raw ?? "";
  if (view.chatlist) {
    return Array.from(view.chatlist.children)
      .map((li) => li.textContent ?? "")
      .join("\n");
  }
  return "";
}

function applyOutput(view: WorkspaceView, input: string, output: string): void {
  if (view.display) {
    view.display.value = output;
  }
  if (view.chatlist) {
    appendChat(view, "user", input);
    appendChat(view, "assistant", output);
  }
  if (view.richarea) {
    view.richarea.dataset.raw = output;
    paintRichArea(view);
  }
}

function appendChat(view: WorkspaceView, role: string, text: string): void {
  if (!view.chatlist) return;
  const item = view.chatlist.ownerDocument.createElement("li");
  item.className = `chat-${role}`;
  item.textContent = text;
  view.chatlist.appendChild(item);
}

/** Minimal markdown: bold, italic, inline code, line breaks. */
function renderMarkdown(text: string): string {
  const escaped = text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;");
  return escaped
    .replace(/\*\*([^*]+)\*\*/g, "<strong>$1</strong>")
    .replace(/\*([^*]+)\*/g, "<em>$1</em>")
    .replace(/`([^`]+)`/g, "<code>$1</code>")
    .replace(/\n/g, "<br>");
}

function paintRichArea(view: WorkspaceView): void {
  if (!view.richarea) return;
  const raw = view.richarea.dataset.raw ?? "";
  view.richarea.dataset.mode = view.richMode;
  if (view.richMode === "render") {
    view.richarea.innerHTML = renderMarkdown(raw);
  } else {
    view.richarea.textContent = raw;
  }
}

export function toggleRichMode(view: WorkspaceView): void {
  view.richMode = view.richMode === "render" ? "editor" : "render";
  paintRichArea(view);
}

export async function dispatchAction(view: WorkspaceView, action: ActionButtonSpec): Promise<void> {
  if (action.preset === "copy") {
    const text = displayText(view);
    view.lastCopied = text;
    try {
      await navigator.clipboard?.writeText(text);
    } catch {
      // clipboard permission denied or unavailable; lastCopied still holds it
    }
    return;
  }
  if (action.preset === "clear") {
    if (view.display) view.display.value = "";
    if (view.input) view.input.value = "";
    if (view.chatlist) view.chatlist.replaceChildren();
    if (view.richarea) {
      view.richarea.dataset.raw = "";
      paintRichArea(view);
    }
    view.messageLog.replaceChildren();
    view.sessionId = null;
    clearBanner(view);
    postEvent(view.baseUrl, "frontend.clear").catch(() => undefined);
    return;
  }
  if (action.preset === "send-input") {
    await sendInput(view);
    return;
  }
  // A func-backed button has no client-side behavior of its own; its bind
  // event is the engine-side hook.
  if (action.bind) {
    await postEvent(view.baseUrl, action.bind).catch(() => undefined);
    return;
  }
  console.warn("[workspace] action with neither preset nor bind; ignoring");
}

async function sendInput(view: WorkspaceView): Promise<void> {
  if (view.running) {
    return; // at most one in-flight run per workspace
  }
  const input = view.input?.value ?? "";
  if (!input.trim()) {
    showBanner(view, "Type some input first.");
    return;
  }
  view.running = true;
  clearBanner(view);
  try {
    const result = await runAgent(view.baseUrl, view.agent, input, view.sessionId);
    view.sessionId = result.session_id;
    applyOutput(view, input, result.output);
    if (view.input) {
      view.input.value = "";
    }
  } catch (error) {
    // Run failed: banner up, input preserved for another attempt.
    const message = error instanceof ApiError ? error.message : String(error);
    showBanner(view, `Run failed: ${message}`);
  } finally {
    view.running = false;
  }
}

export function logFrontendMessage(view: WorkspaceView, text: string): void {
  const item = view.messageLog.ownerDocument.createElement("li");
  item.textContent = text;
  view.messageLog.appendChild(item);
}

/**
 * Route one bridge message into the view: "event" clicks every button bound
 * to that event name (and flips the richarea mode switch), "frontend_message"
 * appends to the log, "run_result" for this agent's session updates the
 * display.
 */
export function handleBridgeMessage(view: WorkspaceView, message: BridgeMessage): void {
  if (message.kind === "event" && typeof message.body.event === "string") {
    const eventName = message.body.event;
    if (view.richSwitchEvent && eventName === view.richSwitchEvent) {
      toggleRichMode(view);
    }
    for (const [bind, buttons] of view.boundButtons) {
      if (bind === eventName) {
        for (const button of buttons) {
          button.click();
        }
      }
    }
    return;
  }
  if (message.kind === "frontend_message" && typeof message.body.text === "string") {
    logFrontendMessage(view, message.body.text);
    return;
  }
  if (message.kind === "run_result") {
    if (
      message.body.agent === view.agent &&
      message.body.session_id === view.sessionId &&
      typeof message.body.output === "string" &&
      !view.running
    ) {
      applyOutput(view, "", message.body.output);
    }
  }
}

export interface ShortcutOptions {
  target?: EventTarget;
  forwardEvent?: (event: string) => void;
}

/**
 * Listen for keydown, encode chords with the engine's rule, and act on the
 * workspace's bindings: preset bindings run locally, everything else is
 * forwarded to the engine bus. Plain typing into text fields is ignored.
 */
export function bindShortcuts(view: WorkspaceView, options: ShortcutOptions = {}): () => void {
  const target = options.target ?? window;
  const forward = options.forwardEvent ?? ((event: string) => {
    void postEvent(view.baseUrl, event).catch(() => undefined);
  });

  const listener = (raw: Event) => {
    const event = raw as KeyboardEvent;
    if (shouldIgnoreKeyboardShortcut(event)) {
      return;
    }
    for (const binding of view.bindings) {
      if (binding.present_only && !view.foreground) {
        continue;
      }
      const chord = chordFromKeyboardEvent(event, binding.scope as never);
      if (!chord) {
        return;
      }
      if (encodeKeyChord(chord) !== binding.event) {
        continue;
      }
      event.preventDefault();
      if (binding.preset) {
        void dispatchAction(view, { preset: binding.preset });
      } else {
        forward(binding.event);
      }
    }
  };
  target.addEventListener("keydown", listener);
  return () => target.removeEventListener("keydown", listener);
}
