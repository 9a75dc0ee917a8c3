// Publishing: one PUT per card, subscriber lists derived from the wires.
// Rejections surface inline at the offending line; a network failure
// marks the remaining cards unpublished rather than pretending.

import type { GatewayClient } from "./client.js";
import type { CanvasModel } from "./model.js";
import { subscribersOf } from "./model.js";

export interface PublishOutcome {
  id: string;
  state: "published" | "rejected" | "unpublished";
  error?: { line: number; message: string };
}

export async function publishAll(
  model: CanvasModel,
  client: GatewayClient,
): Promise<PublishOutcome[]> {
  const outcomes: PublishOutcome[] = [];
  const cards = Object.values(model.cards);
  let networkDown = false;
  for (const card of cards) {
    if (networkDown) {
      outcomes.push({ id: card.id, state: "unpublished" });
      continue;
    }
    try {
      const result = await client.putProgram(card.id, card.salt, subscribersOf(model, card.id));
      if (result.ok) {
        outcomes.push({ id: card.id, state: "published" });
      } else {
        const line =
          result.rejection.line ?? result.rejection.issues?.[0]?.line ?? 0;
        outcomes.push({
          id: card.id,
          state: "rejected",
          error: { line, message: result.rejection.message },
        });
      }
    } catch {
      networkDown = true;
      outcomes.push({ id: card.id, state: "unpublished" });
    }
  }
  return outcomes;
}

/** Fold publish outcomes back into the card states. */
export function applyOutcomes(model: CanvasModel, outcomes: PublishOutcome[]): CanvasModel {
  const cards = { ...model.cards };
  for (const outcome of outcomes) {
    const card = cards[outcome.id];
    if (!card) continue;
    cards[outcome.id] = {
      ...card,
      publishState: outcome.state,
      error: outcome.error ?? null,
    };
  }
  return { ...model, cards };
}
