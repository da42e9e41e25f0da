#include <iostream>

#include "gaussvar/cli.hpp"

int main(int argc, char** argv)
{
	return gaussvar::cli::run(argc, argv, std::cout, std::cerr);
}
