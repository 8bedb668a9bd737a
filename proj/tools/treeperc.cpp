#include <iostream>
#include <string>
#include <vector>

#include "treeperc/cli.hpp"

int main(int argc, char** argv) {
    return treeperc::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
