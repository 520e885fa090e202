// Copyright (C) 2026 The keyweave Authors
// SPDX-License-Identifier: Apache-2.0

// The packaged libbenchmark_main archive is built with a different LTO
// version than the system compiler, so the entry point lives here.

#include <benchmark/benchmark.h>

BENCHMARK_MAIN();
