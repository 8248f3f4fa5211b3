export type ViewName = "group" | "case_by_case" | "similarity" | "session";

export const ALL_VIEWS: readonly ViewName[] = ["group", "case_by_case", "similarity", "session"];

/**
 * Stage gating for the three exploration views while a session is live:
 * stages 1-2 compare cases, stage 3 explores similarity, stage 4 explores
 * groups.  Outside a session (stage null) every view is open.  The session
 * tab itself is always reachable; the server enforces the protocol
 * regardless of what the navigation allows.
 */
export function availableViews(stage: number | null): ViewName[] {
  if (stage === null) {
    return [...ALL_VIEWS];
  }
  if (stage === 1 || stage === 2) {
    return ["case_by_case", "session"];
  }
  if (stage === 3) {
    return ["similarity", "session"];
  }
  return ["group", "session"];
}
