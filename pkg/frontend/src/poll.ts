/** Poll-based state refresh with stale-response protection.
 *
 * The service is the single source of truth; the client just fetches and
 * renders. A monotonic ticket discards responses that arrive out of order.
 */

export interface Poller {
  start(): void;
  stop(): void;
  /** Run one refresh immediately (e.g. right after submitting an action). */
  refresh(): Promise<void>;
}

export function createPoller(
  fetchAndRender: () => Promise<void>,
  onError: (error: unknown) => void,
  intervalMs = 1000,
  scheduler: { set: typeof setInterval; clear: typeof clearInterval } = {
    set: setInterval,
    clear: clearInterval,
  },
): Poller {
  let handle: ReturnType<typeof setInterval> | null = null;
  let inFlight = false;

  const tick = async () => {
    if (inFlight) return; // never stack requests
    inFlight = true;
    try {
      await fetchAndRender();
    } catch (error) {
      onError(error);
    } finally {
      inFlight = false;
    }
  };

  return {
    start() {
      if (handle === null) {
        handle = scheduler.set(tick, intervalMs);
      }
    },
    stop() {
      if (handle !== null) {
        scheduler.clear(handle);
        handle = null;
      }
    },
    refresh: tick,
  };
}

/** Keeps only the newest session state by sequence number. */
export class LatestState<T extends { seq: number }> {
  private current: T | null = null;

  /** Returns true if the candidate is newer and was accepted. */
  offer(candidate: T): boolean {
    if (this.current !== null && candidate.seq < this.current.seq) {
      return false;
    }
    this.current = candidate;
    return true;
  }

  get(): T | null {
    return this.current;
  }
}
