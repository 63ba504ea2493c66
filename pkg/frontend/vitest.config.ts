import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["tests/**/*.test.ts"],
    environment: "node",
    // e2e starts the Python analysis service in a hook
    testTimeout: 30_000,
    hookTimeout: 30_000,
  },
});
