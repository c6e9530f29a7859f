// Copyright 2026 The ocpn Authors.
// Licensed under the Apache 2.0 license found in the LICENSE file or at:
//     https://opensource.org/licenses/Apache-2.0
#pragma once

#include <iosfwd>

namespace ocpn {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Entry point of the `ocpn` tool. Subcommands: stats, flatten, diagnose,
/// discover, annotate, render, simulate, conformance, failures, serve.
/// Relative output paths are resolved against $OCPN_OUTPUT_DIR when set;
/// files are written atomically and never left half-written.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ocpn
