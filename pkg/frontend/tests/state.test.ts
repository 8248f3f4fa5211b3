import { describe, expect, it } from "vitest";

import { availableViews } from "../src/state.js";

describe("stage gating", () => {
  it("opens every view outside a session", () => {
    expect(availableViews(null)).toEqual(["group", "case_by_case", "similarity", "session"]);
  });

  it("restricts stages 1 and 2 to case comparison", () => {
    expect(availableViews(1)).toEqual(["case_by_case", "session"]);
    expect(availableViews(2)).toEqual(["case_by_case", "session"]);
  });

  it("restricts stage 3 to the similarity view", () => {
    expect(availableViews(3)).toEqual(["similarity", "session"]);
  });

  it("restricts stage 4 to the group view", () => {
    expect(availableViews(4)).toEqual(["group", "session"]);
  });
});
