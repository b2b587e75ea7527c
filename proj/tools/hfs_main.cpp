#include <iostream>

#include "hfs/cli.hpp"

int main(int argc, char** argv)
{
    return hfs::run_cli(argc, argv, std::cout, std::cerr);
}
