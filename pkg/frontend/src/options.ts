/** Token storage and the options panel.
 *
 * The access token lives in local storage on the user's machine and is
 * entered through the options panel only — it is sent to the service with
 * feedback requests but never written into page content.
 */

export interface StorageLike {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
  removeItem(key: string): void;
}

export const TOKEN_KEY = "cqaguard.token";

export class TokenStore {
  constructor(private readonly storage: StorageLike) {}

  getToken(): string | null {
    const value = this.storage.getItem(TOKEN_KEY);
    return value === null || value.length === 0 ? null : value;
  }

  setToken(token: string): void {
    const trimmed = token.trim();
    if (trimmed.length === 0) {
      this.storage.removeItem(TOKEN_KEY);
    } else {
      this.storage.setItem(TOKEN_KEY, trimmed);
    }
  }

  clearToken(): void {
    this.storage.removeItem(TOKEN_KEY);
  }
}

/** In-memory stand-in for environments without local storage. */
export class MemoryStorage implements StorageLike {
  private readonly values = new Map<string, string>();

  getItem(key: string): string | null {
    return this.values.get(key) ?? null;
  }

  setItem(key: string, value: string): void {
    this.values.set(key, value);
  }

  removeItem(key: string): void {
    this.values.delete(key);
  }
}

/** Token entry form: an input, a save button, and a clear button. */
export function renderOptionsPanel(container: Element, store: TokenStore): Element {
  const doc = container.ownerDocument;
  container.textContent = "";

  const panel = doc.createElement("form");
  panel.className = "cqaguard-options";

  const input = doc.createElement("input");
  input.className = "cqaguard-token-input";
  input.setAttribute("type", "password");
  input.setAttribute("placeholder", "feedback token");
  input.value = store.getToken() ?? "";

  const save = doc.createElement("button");
  save.className = "cqaguard-token-save";
  save.setAttribute("type", "button");
  save.textContent = "save token";
  save.addEventListener("click", () => {
    store.setToken(input.value);
    status.textContent = store.getToken() === null ? "token cleared" : "token saved";
  });

  const clear = doc.createElement("button");
  clear.className = "cqaguard-token-clear";
  clear.setAttribute("type", "button");
  clear.textContent = "clear";
  clear.addEventListener("click", () => {
    store.clearToken();
    input.value = "";
    status.textContent = "token cleared";
  });

  const status = doc.createElement("div");
  status.className = "cqaguard-token-status";

  panel.appendChild(input);
  panel.appendChild(save);
  panel.appendChild(clear);
  panel.appendChild(status);
  container.appendChild(panel);
  return container;
}
