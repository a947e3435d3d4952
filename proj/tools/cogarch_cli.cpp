#include "cogarch/cli.hpp"

int main(int argc, char** argv) { return cogarch::run_cli(argc, argv); }
