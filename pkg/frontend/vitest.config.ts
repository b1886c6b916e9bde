import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "jsdom",
    include: ["tests/**/*.test.ts"],
    testTimeout: 60_000,
    hookTimeout: 60_000,
    // Test files share nothing, but each boots its own backend process;
    // keep them sequential so ports and Python startup stay predictable.
    fileParallelism: false,
  },
});
