#include <iostream>
#include <string>
#include <vector>

#include "raftcensus/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return raftcensus::dispatch(args, std::cout, std::cerr);
}
