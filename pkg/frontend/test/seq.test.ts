import { describe, expect, it, vi } from "vitest";

import { debounce, LatestWins } from "../src/seq.js";

describe("LatestWins", () => {
  it("only the newest token is current", () => {
    const seq = new LatestWins();
    const first = seq.issue();
    const second = seq.issue();
    expect(seq.isCurrent(first)).toBe(false);
    expect(seq.isCurrent(second)).toBe(true);
  });

  it("an old token never becomes current again", () => {
    const seq = new LatestWins();
    const first = seq.issue();
    seq.issue();
    seq.issue();
    expect(seq.isCurrent(first)).toBe(false);
  });
});

describe("debounce", () => {
  it("collapses a burst into a single trailing call", () => {
    vi.useFakeTimers();
    try {
      const fn = vi.fn();
      const debounced = debounce(fn, 50);
      debounced();
      debounced();
      debounced();
      vi.advanceTimersByTime(49);
      expect(fn).not.toHaveBeenCalled();
      vi.advanceTimersByTime(2);
      expect(fn).toHaveBeenCalledTimes(1);
    } finally {
      vi.useRealTimers();
    }
  });

  it("separate bursts each fire once", () => {
    vi.useFakeTimers();
    try {
      const fn = vi.fn();
      const debounced = debounce(fn, 20);
      debounced();
      vi.advanceTimersByTime(30);
      debounced();
      vi.advanceTimersByTime(30);
      expect(fn).toHaveBeenCalledTimes(2);
    } finally {
      vi.useRealTimers();
    }
  });
});
