// Copyright 2026 The ocpn Authors.
// Licensed under the Apache 2.0 license found in the LICENSE file or at:
//     https://opensource.org/licenses/Apache-2.0
#include <iostream>

#include "ocpn/cli.hpp"

int main(int argc, char** argv) { return ocpn::run_cli(argc, argv, std::cout, std::cerr); }
