#include <iostream>
#include <string>
#include <vector>

#include "lindbloch/cli_io.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return lindbloch::cli::run(args, std::cout, std::cerr);
}
