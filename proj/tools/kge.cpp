#include <iostream>

#include "kge/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return kge::run_command(args, std::cout, std::cerr);
}
