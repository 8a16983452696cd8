#include <iostream>

#include "grouptc/cli.hpp"

int main(int argc, char** argv) { return gtc::run_cli(argc, argv, std::cout, std::cerr); }
