#include <iostream>

#include "svasym/cli.hpp"

int main(int argc, char** argv) { return svasym::dispatch(argc, argv, std::cout, std::cerr); }
