import { defineConfig } from "vitest/config";

export default defineConfig({
    test: {
        // the integration test boots the Python service
        testTimeout: 30000,
        hookTimeout: 60000,
    },
});
