#include "fdrlab/cli.hpp"

int main(int argc, char** argv) { return fdrlab::cli::run_cli(argc, argv); }
