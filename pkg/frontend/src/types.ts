// Wire types mirroring the engine's workspace endpoint and event bridge.

export interface AgentSummary {
  name: string;
  icon: string;
  desc: string;
}

export interface ActionButtonSpec {
  preset?: string;
  icon?: string;
  desc?: string;
  bind?: string;
  func?: boolean;
}

export interface WorkspaceComponentSpec {
  kind: string;
  actions?: ActionButtonSpec[];
  mode?: string;
  switch_event?: string | null;
}

export interface KeyBindingSpec {
  scope: string;
  key: string;
  modifiers: string[];
  event: string;
  preset?: string | null;
  present_only: boolean;
}

export interface WorkspaceSpec {
  agent: string;
  components: WorkspaceComponentSpec[];
  bindings: KeyBindingSpec[];
}

export interface RunResponse {
  output: string;
  session_id: string;
}

export type BridgeKind = "event" | "frontend_message" | "run_result";

export interface BridgeMessage {
  kind: BridgeKind;
  body: Record<string, unknown> & {
    event?: string;
    text?: string;
    agent?: string;
    session_id?: string;
    output?: string;
  };
  seq: number;
}
