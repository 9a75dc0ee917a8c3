// Canvas state and the event reducer.
//
// The rendered state is a pure function of (user drafts, event stream up
// to the last applied sequence number): `applyEvent` is side-effect free,
// deduplicates by sequence number, and replaying the same records always
// reconstructs the same indicators.

import type { EventRecord } from "./types.js";

export type PublishState =
  | "draft"
  | "published"
  | "rejected"
  | "faulted"
  | "unpublished";

export interface Indicators {
  led: boolean | null; // null: never actuated
  notification: string | null;
  activity: number; // messages seen from this node
}

export interface Card {
  id: string;
  kind: string;
  salt: string;
  publishState: PublishState;
  error: { line: number; message: string } | null;
  indicators: Indicators;
}

export interface Wire {
  from: string; // emitting card
  to: string; // subscribing card
}

export interface CanvasModel {
  cards: Record<string, Card>;
  wires: Wire[];
  lastSeq: number;
}

export function makeCard(id: string, kind: string, salt = ""): Card {
  return {
    id,
    kind,
    salt,
    publishState: "draft",
    error: null,
    indicators: { led: null, notification: null, activity: 0 },
  };
}

export function makeModel(cards: Card[], wires: Wire[]): CanvasModel {
  for (const wire of wires) {
    const known = (id: string) => cards.some((c) => c.id === id);
    if (!known(wire.from) || !known(wire.to)) {
      throw new Error(`wire ${wire.from}->${wire.to} references a missing card`);
    }
  }
  return {
    cards: Object.fromEntries(cards.map((c) => [c.id, c])),
    wires: [...wires],
    lastSeq: 0,
  };
}

/** Subscriber list of a card, derived from the outgoing wires (in order). */
export function subscribersOf(model: CanvasModel, id: string): string[] {
  return model.wires.filter((w) => w.from === id).map((w) => w.to);
}

function cloneCard(card: Card): Card {
  return { ...card, indicators: { ...card.indicators }, error: card.error && { ...card.error } };
}

/**
 * Fold one event record into the model. Records at or below `lastSeq`
 * are duplicates from a reconnect and are ignored.
 */
export function applyEvent(model: CanvasModel, record: EventRecord): CanvasModel {
  if (record.seq <= model.lastSeq) return model;
  const card = model.cards[record.node];
  if (!card) return { ...model, lastSeq: record.seq };

  const next = cloneCard(card);
  switch (record.kind) {
    case "actuated": {
      const word = record.payload.word;
      const args = record.payload.args ?? [];
      if (word === "led") next.indicators.led = args[0] === "on";
      if (word === "notify") next.indicators.notification = args[0] ?? "";
      next.indicators.activity += 1;
      break;
    }
    case "emitted":
    case "sensor-injected":
      next.indicators.activity += 1;
      break;
    case "faulted":
      next.publishState = "faulted";
      break;
    case "cleared":
      next.publishState = "draft";
      next.indicators = { led: null, notification: null, activity: next.indicators.activity };
      break;
    case "programmed":
      break; // publish state is owned by the publish flow
  }
  return {
    ...model,
    cards: { ...model.cards, [record.node]: next },
    lastSeq: record.seq,
  };
}

export function applyAll(model: CanvasModel, records: EventRecord[]): CanvasModel {
  return records.reduce(applyEvent, model);
}

/** Indicator snapshot used by the renderer and by replay tests. */
export function indicatorState(model: CanvasModel): Record<string, Indicators> {
  return Object.fromEntries(
    Object.values(model.cards).map((c) => [c.id, { ...c.indicators }]),
  );
}
