#include "beqtest/cli.hpp"

int main(int argc, char** argv) { return beq::run_cli(argc, argv); }
