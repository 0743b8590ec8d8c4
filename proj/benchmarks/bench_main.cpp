#include <benchmark/benchmark.h>

// the distro's static benchmark_main archive ships LTO bytecode our
// toolchain can't read, so supply the entry point here instead
BENCHMARK_MAIN();
