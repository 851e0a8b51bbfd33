/** Client-generated opaque session id, stable for the lifetime of a tab. */

const STORAGE_KEY = "librank-session";

export function newSessionId(): string {
  const noise =
    Math.random().toString(36).slice(2, 10) + Date.now().toString(36);
  return `ui-${noise}`;
}

export function getSessionId(storage?: Storage): string {
  if (!storage) {
    return newSessionId();
  }
  let sid = storage.getItem(STORAGE_KEY);
  if (!sid) {
    sid = newSessionId();
    storage.setItem(STORAGE_KEY, sid);
  }
  return sid;
}
