#include <iostream>
#include <string>
#include <vector>

#include "swarmdec/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return swarmdec::cli::run(args, std::cout, std::cerr);
}
