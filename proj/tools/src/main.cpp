// Copyright 2026 nearlink contributors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "nearlink_cli/cli.hpp"

int main(int argc, char** argv)
{
    return nearlink::cli::cli_main(argc, argv, std::cout, std::cerr);
}
