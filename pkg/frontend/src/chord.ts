// Keyboard chord encoding, byte-identical to the engine's rule:
// "<scope>.keydown.<modifiers in control,shift,alt,meta order>.<key>".
// A shared vector file keeps the two implementations honest.

export type ChordScope = "global" | "window" | "content";

export interface KeyChord {
  modifiers: string[];
  key: string;
  scope: ChordScope;
}

const MODIFIER_ORDER = ["control", "shift", "alt", "meta"] as const;
const SEGMENT_RE = /^[a-z0-9_-]+$/;

const KEY_NAME_OVERRIDES: Record<string, string> = {
  " ": "space",
  spacebar: "space",
  esc: "escape",
};

export function encodeKeyChord(chord: KeyChord): string {
  if (!chord.key) {
    throw new Error("chord key must be non-empty");
  }
  const key = chord.key.toLowerCase();
  if (!SEGMENT_RE.test(key)) {
    throw new Error(`chord key ${JSON.stringify(chord.key)} must match [a-z0-9_-]+`);
  }
  const have = new Set(chord.modifiers.map((m) => m.toLowerCase()));
  const parts: string[] = [chord.scope, "keydown"];
  for (const modifier of MODIFIER_ORDER) {
    if (have.has(modifier)) {
      parts.push(modifier);
    }
  }
  parts.push(key);
  return parts.join(".");
}

/**
 * Translate a browser KeyboardEvent into a chord, or null for a pure
 * modifier press (holding Shift alone is not a shortcut).
 */
export function chordFromKeyboardEvent(
  event: KeyboardEvent,
  scope: ChordScope = "window",
): KeyChord | null {
  if (["Control", "Shift", "Alt", "Meta"].includes(event.key)) {
    return null;
  }
  const modifiers: string[] = [];
  if (event.ctrlKey) modifiers.push("control");
  if (event.shiftKey) modifiers.push("shift");
  if (event.altKey) modifiers.push("alt");
  if (event.metaKey) modifiers.push("meta");
  const key = KEY_NAME_OVERRIDES[event.key] ?? event.key.toLowerCase();
  if (!SEGMENT_RE.test(key)) {
    return null;
  }
  return { modifiers, key, scope };
}

/**
 * Editing guard: plain keystrokes aimed at a text field are typing, not
 * shortcuts. Chords carrying control or meta still pass through.
 */
export function shouldIgnoreKeyboardShortcut(event: KeyboardEvent): boolean {
  if (event.ctrlKey || event.metaKey) {
    return false;
  }
  const target = event.target as HTMLElement | null;
  if (!target) {
    return false;
  }
  return (
    target.tagName === "INPUT" ||
    target.tagName === "TEXTAREA" ||
    target.isContentEditable === true
  );
}
