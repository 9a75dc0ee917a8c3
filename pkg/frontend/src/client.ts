// Thin fetch client for the gateway: node lifecycle calls plus the
// line-delimited JSON event stream.

import type { Delivery, Descriptor, EventRecord, RejectionBody } from "./types.js";

export type PutResult =
  | { ok: true; delivery: Delivery }
  | { ok: false; rejection: RejectionBody };

export class GatewayClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchImpl: typeof fetch = fetch,
  ) {}

  private async call(method: string, path: string, body?: unknown): Promise<Response> {
    return this.fetchImpl(this.baseUrl + path, {
      method,
      headers: { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
  }

  async createNode(kind: string, id?: string): Promise<Descriptor> {
    const res = await this.call("POST", "/nodes", id ? { kind, id } : { kind });
    if (res.status !== 201) throw new Error(`create ${kind}: HTTP ${res.status}`);
    return (await res.json()) as Descriptor;
  }

  async listNodes(): Promise<Descriptor[]> {
    const res = await this.call("GET", "/nodes");
    return (await res.json()) as Descriptor[];
  }

  async putProgram(id: string, program: string, subscribers: string[]): Promise<PutResult> {
    const res = await this.call("PUT", `/nodes/${id}`, { program, subscribers });
    if (res.status === 200) return { ok: true, delivery: (await res.json()) as Delivery };
    if (res.status === 400) return { ok: false, rejection: (await res.json()) as RejectionBody };
    throw new Error(`put ${id}: HTTP ${res.status}`);
  }

  async deleteNode(id: string): Promise<void> {
    await this.call("DELETE", `/nodes/${id}`);
  }

  /** Inject a sensing event; returns the HTTP status (200, 409, 422). */
  async injectSensor(id: string, word: string, args: string[] = []): Promise<number> {
    const res = await this.call("POST", `/nodes/${id}/sensors/${word}`, { args });
    await res.text();
    return res.status;
  }

  async postMessage(id: string, word: string, args: string[] = []): Promise<number> {
    const res = await this.call("POST", `/nodes/${id}/messages`, { word, args });
    await res.text();
    return res.status;
  }

  /** Buffered events newer than `since`, one shot. */
  async replayEvents(since = 0): Promise<EventRecord[]> {
    const res = await this.call("GET", `/events?since=${since}&replay=1`);
    return (await res.json()) as EventRecord[];
  }

  /**
   * Live-tail the ndjson stream, invoking `onRecord` per event until the
   * signal aborts. Replays records newer than `since` first.
   */
  async streamEvents(
    since: number,
    onRecord: (record: EventRecord) => void,
    signal: AbortSignal,
  ): Promise<void> {
    const res = await this.fetchImpl(`${this.baseUrl}/events?since=${since}`, { signal });
    if (!res.body) throw new Error("event stream has no body");
    const reader = res.body.getReader();
    const decoder = new TextDecoder();
    let buffer = "";
    try {
      for (;;) {
        const { done, value } = await reader.read();
        if (done) break;
        buffer += decoder.decode(value, { stream: true });
        let cut;
        while ((cut = buffer.indexOf("\n")) >= 0) {
          const line = buffer.slice(0, cut).trim();
          buffer = buffer.slice(cut + 1);
          if (line) onRecord(JSON.parse(line) as EventRecord);
        }
      }
    } catch (err) {
      if (!signal.aborted) throw err;
    }
  }
}
