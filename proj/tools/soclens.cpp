#include <iostream>
#include <vector>

#include "soclens/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return soclens::run_cli(args, std::cout, std::cerr);
}
