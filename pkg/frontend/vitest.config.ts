import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "jsdom",
    include: ["tests/**/*.test.ts"],
    // the wizard suite drives a real service subprocess end to end
    testTimeout: 120_000,
    hookTimeout: 120_000,
  },
});
