#include <iostream>
#include <string>
#include <vector>

#include "tailtest/cli.hpp"

int main(int argc, char** argv) {
    const std::vector<std::string> args(argv, argv + argc);
    return tailtest::run_cli(args, std::cout, std::cerr);
}
