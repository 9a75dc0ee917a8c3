// The playground page: cards with SALT editors, publish-all, virtual
// sensors, and live indicators driven purely by the event stream.

import { GatewayClient } from "./client.js";
import { demoCanvas } from "./canvas.js";
import { applyEvent, subscribersOf, type CanvasModel, type Card } from "./model.js";
import { applyOutcomes, publishAll } from "./publish.js";

const gatewayUrl =
  new URLSearchParams(location.search).get("gateway") ?? "http://127.0.0.1:8080";
const client = new GatewayClient(gatewayUrl);

let model: CanvasModel = demoCanvas();
let streamAbort = new AbortController();

// All mutation goes through this single queue: stream records and user
// actions are serialized, and the DOM is re-rendered from the model only.
function update(mutate: (m: CanvasModel) => CanvasModel): void {
  model = mutate(model);
  render();
}

function badgeClass(card: Card): string {
  return `badge ${card.publishState}`;
}

function cardHtml(card: Card): string {
  const subs = subscribersOf(model, card.id).join(", ") || "none";
  const led =
    card.indicators.led === null ? "" :
    `<span class="led ${card.indicators.led ? "on" : "off"}"></span>`;
  const note = card.indicators.notification
    ? `<div class="note">“${card.indicators.notification}”</div>` : "";
  const error = card.error
    ? `<div class="error">line ${card.error.line}: ${card.error.message}</div>` : "";
  const sensor = card.kind === "button"
    ? `<button class="push" data-node="${card.id}">push</button>` : "";
  return `
    <div class="card" data-card="${card.id}">
      <header>
        <strong>${card.id}</strong> <em>${card.kind}</em>
        <span class="${badgeClass(card)}">${card.publishState}</span>
        ${led}
      </header>
      <textarea data-salt="${card.id}" rows="4" spellcheck="false">${card.salt}</textarea>
      ${error}
      <footer>notifies: ${subs} ${sensor} <span class="activity">${card.indicators.activity} ev</span></footer>
      ${note}
    </div>`;
}

function render(): void {
  const root = document.getElementById("canvas");
  if (!root) return;
  root.innerHTML = Object.values(model.cards).map(cardHtml).join("\n");
  for (const area of root.querySelectorAll<HTMLTextAreaElement>("textarea[data-salt]")) {
    area.addEventListener("change", () => {
      const id = area.dataset.salt!;
      update((m) => ({
        ...m,
        cards: { ...m.cards, [id]: { ...m.cards[id]!, salt: area.value, publishState: "draft" } },
      }));
    });
  }
  for (const button of root.querySelectorAll<HTMLButtonElement>("button.push")) {
    button.addEventListener("click", () => {
      const id = button.dataset.node!;
      void client.injectSensor(id, "push").then((status) => {
        if (status === 200) return;
        // 409: no behaviour or faulted; 422: unsupported sensing word
        const label = status === 409 ? "no published behaviour" : `rejected (HTTP ${status})`;
        update((m) => ({
          ...m,
          cards: {
            ...m.cards,
            [id]: { ...m.cards[id]!, error: { line: 0, message: label } },
          },
        }));
      });
    });
  }
  const status = document.getElementById("status");
  if (status) status.textContent = `gateway ${gatewayUrl} — seq ${model.lastSeq}`;
}

async function ensureNodes(): Promise<void> {
  const existing = new Set((await client.listNodes()).map((d) => d.id));
  for (const card of Object.values(model.cards)) {
    if (!existing.has(card.id)) await client.createNode(card.kind, card.id);
  }
}

function startStream(): void {
  streamAbort.abort();
  streamAbort = new AbortController();
  void client
    .streamEvents(model.lastSeq, (record) => update((m) => applyEvent(m, record)), streamAbort.signal)
    .catch(() => {
      // connection lost: retry with the last applied sequence (dedup by seq
      // makes the replay idempotent)
      setTimeout(startStream, 1000);
    });
}

function setStatus(text: string): void {
  const status = document.getElementById("status");
  if (status) status.textContent = text;
}

document.getElementById("publish")?.addEventListener("click", () => {
  void (async () => {
    try {
      await ensureNodes();
      const outcomes = await publishAll(model, client);
      update((m) => applyOutcomes(m, outcomes));
    } catch {
      setStatus(`gateway ${gatewayUrl} unreachable`);
    }
  })();
});

function connect(): void {
  void ensureNodes()
    .then(startStream)
    .catch(() => {
      setStatus(`gateway ${gatewayUrl} unreachable — retrying`);
      setTimeout(connect, 2000);
    });
}

render();
connect();
