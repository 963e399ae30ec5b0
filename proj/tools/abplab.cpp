// SPDX-License-Identifier: Apache-2.0
#include <string>
#include <vector>

#include "abp/cli.hpp"

int main(int argc, char** argv) {
    return abp::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}
