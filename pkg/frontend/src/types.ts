// Wire types of the gateway HTTP API.

export interface WireMessage {
  kind: "e" | "l" | "h";
  word: string;
  args: string[];
}

export interface Descriptor {
  id: string;
  version: string;
  features: string[];
  sensing: { feature: string; word: string; arity: number }[];
  actuating: { feature: string; word: string; arity: number }[];
  kind?: string;
}

export interface DispatchEntry {
  to: string;
  word: string;
  args: string[];
  status: string;
}

export interface Delivery {
  emitted: WireMessage[];
  dispatched: DispatchEntry[];
}

export interface EventRecord {
  seq: number;
  ts: number;
  node: string;
  kind:
    | "emitted"
    | "actuated"
    | "programmed"
    | "cleared"
    | "sensor-injected"
    | "faulted";
  payload: Record<string, unknown> & Partial<WireMessage>;
}

export interface RejectionBody {
  status: "rejected";
  reason: "parse" | "validation" | "subscribers" | "runtime";
  message: string;
  line?: number;
  col?: number;
  issues?: { severity: string; message: string; line: number }[];
}
