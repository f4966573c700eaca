#include <iostream>

#include "snlab/cli.hpp"

int main(int argc, char** argv) {
    return snlab::run_cli(argc, argv, std::cout, std::cerr);
}
