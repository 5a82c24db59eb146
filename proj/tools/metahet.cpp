// SPDX-License-Identifier: Apache-2.0
#include <iostream>

#include "metahet/cli.hpp"

int main(int argc, char** argv) { return metahet::run_cli(argc, argv, std::cout, std::cerr); }
