// Single point of configuration: where the REST service lives.
// Override order: global injected by the host page, then a saved value,
// then the local dev default.

const DEFAULT_BASE_URL = "http://127.0.0.1:8000";
const STORAGE_KEY = "revisecoach.baseUrl";

export function baseUrl(): string {
  const injected = (globalThis as Record<string, unknown>)["REVISECOACH_BASE_URL"];
  if (typeof injected === "string" && injected) {
    return injected.replace(/\/+$/, "");
  }
  try {
    const saved = globalThis.localStorage?.getItem(STORAGE_KEY);
    if (saved) {
      return saved.replace(/\/+$/, "");
    }
  } catch {
    // localStorage unavailable (private mode, non-browser host)
  }
  return DEFAULT_BASE_URL;
}

export function setBaseUrl(url: string): void {
  globalThis.localStorage?.setItem(STORAGE_KEY, url);
}

export const POLL_INTERVAL_MS = 2000;
