#include <iostream>

#include "jcl/cli.hpp"

int main(int argc, char** argv) { return jcl::cli::run(argc, argv, std::cout, std::cerr); }
