#include <iostream>

#include "cbjj/cli.hpp"

int main(int argc, char** argv)
{
    return cbjj::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
