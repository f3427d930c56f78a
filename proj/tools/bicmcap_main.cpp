#include <iostream>
#include <string>
#include <vector>

#include "bicmcap/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return bicmcap::run_cli(args, std::cout, std::cerr);
}
