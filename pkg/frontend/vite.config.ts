import { defineConfig } from "vite";

// base "./" so the bundle works when the annotation service hosts dist/ at /
export default defineConfig({
  base: "./",
  build: {
    outDir: "dist",
    emptyOutDir: true,
  },
});
