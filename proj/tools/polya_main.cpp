// SPDX-License-Identifier: Apache-2.0
#include "polya/cli.hpp"

int main(int argc, char** argv) {
    return polya::cli::main(argc, argv);
}
