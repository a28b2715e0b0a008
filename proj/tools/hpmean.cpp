#include <iostream>
#include <string>
#include <vector>

#include "hpmean/cli.hpp"

int main(int argc, char** argv) {
    std::cout.precision(17);
    return hpmean::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
