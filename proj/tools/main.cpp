#include <iostream>
#include <string>
#include <vector>

#include "pmrd/commands.hpp"

int main(int argc, char** argv) {
    const std::vector<std::string> args(argv + 1, argv + argc);
    return pmrd::run_cli(args, std::cout, std::cerr);
}
