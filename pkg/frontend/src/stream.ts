// Server-sent-event bridge client. The EventSource implementation is
// injectable so tests can drive messages by hand.

import type { BridgeMessage } from "./types.js";

export interface EventSourceLike {
  onmessage: ((event: { data: string }) => void) | null;
  onerror: ((event: unknown) => void) | null;
  close(): void;
}

export type EventSourceFactory = (url: string) => EventSourceLike;

export interface StreamHandle {
  close(): void;
}

export interface StreamOptions {
  sourceFactory?: EventSourceFactory;
  onError?: (error: unknown) => void;
}

const defaultFactory: EventSourceFactory = (url) =>
  new EventSource(url) as unknown as EventSourceLike;

/**
 * Connect to /events/stream and hand each BridgeMessage to `onMessage`
 * in seq order; stale or duplicated seqs are dropped.
 */
export function connectStream(
  baseUrl: string,
  onMessage: (message: BridgeMessage) => void,
  options: StreamOptions = {},
): StreamHandle {
  const factory = options.sourceFactory ?? defaultFactory;
  const source = factory(`${baseUrl}/events/stream`);
  let lastSeq = 0;
  source.onmessage = (event) => {
    let message: BridgeMessage;
    try {
      message = JSON.parse(event.data) as BridgeMessage;
    } catch (error) {
      console.error("[stream] unparseable bridge message:", error);
      return;
    }
    if (typeof message.seq === "number" && message.seq <= lastSeq) {
      return;
    }
    lastSeq = message.seq ?? lastSeq;
    onMessage(message);
  };
  source.onerror = (error) => {
    if (options.onError) {
      options.onError(error);
    }
  };
  return { close: () => source.close() };
}
