import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "node",
    include: ["test/**/*.test.ts"],
    // the live-server suite spawns the python service and waits for retrains
    testTimeout: 60_000,
    hookTimeout: 60_000,
  },
});
