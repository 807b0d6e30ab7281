#include <iostream>
#include <vector>

#include "ocvcap/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return ocvcap::cli::run(std::move(args), std::cout, std::cerr);
}
