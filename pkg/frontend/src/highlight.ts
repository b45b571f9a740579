// Inline span highlighting for the article pane. Spans come from the
// feedback API as character offsets into the article text; overlapping
// or unsorted spans are normalized before rendering.

import type { HighlightSpan } from "./api.js";
import { el } from "./dom.js";

export interface MergedSpan {
  start: number;
  end: number;
  topics: string[];
}

export function mergeSpans(spans: HighlightSpan[], textLength: number): MergedSpan[] {
  const clamped = spans
    .map((s) => ({
      start: Math.max(0, Math.min(s.start, textLength)),
      end: Math.max(0, Math.min(s.end, textLength)),
      topic: s.topic,
    }))
    .filter((s) => s.start < s.end)
    .sort((a, b) => a.start - b.start || a.end - b.end);
  const merged: MergedSpan[] = [];
  for (const span of clamped) {
    const last = merged[merged.length - 1];
    if (last && span.start <= last.end) {
      last.end = Math.max(last.end, span.end);
      if (!last.topics.includes(span.topic)) {
        last.topics.push(span.topic);
      }
    } else {
      merged.push({ start: span.start, end: span.end, topics: [span.topic] });
    }
  }
  return merged;
}

/** Render article text with the given spans wrapped in <mark> elements. */
export function renderHighlighted(text: string, spans: HighlightSpan[]): DocumentFragment {
  const fragment = document.createDocumentFragment();
  let cursor = 0;
  for (const span of mergeSpans(spans, text.length)) {
    if (span.start > cursor) {
      fragment.append(text.slice(cursor, span.start));
    }
    const mark = el("mark", { class: "topic-highlight", title: span.topics.join(", ") }, [
      text.slice(span.start, span.end),
    ]);
    mark.dataset["topics"] = span.topics.join(",");
    fragment.append(mark);
    cursor = span.end;
  }
  if (cursor < text.length) {
    fragment.append(text.slice(cursor));
  }
  return fragment;
}
