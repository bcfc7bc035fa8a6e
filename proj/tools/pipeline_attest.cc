// Copyright 2026 The pipeline-attest Authors.
// Licensed under the Apache License, Version 2.0
// (http://www.apache.org/licenses/LICENSE-2.0).

#include <iostream>

#include "attest/cli/commands.h"

int main(int argc, char** argv) { return attest::run_cli(argc, argv, std::cout, std::cerr); }
