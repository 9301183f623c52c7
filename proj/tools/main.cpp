#include <iostream>
#include <string>
#include <vector>

#include "cachekit/cli.hpp"

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    return cachekit::run_cli(args, std::cout, std::cerr);
}
