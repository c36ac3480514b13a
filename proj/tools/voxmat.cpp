// Command-line entry point; subcommands are filled in by cli.hpp.
#include "voxmat/cli.hpp"

int main(int argc, char** argv) { return voxmat::cli_main(argc, argv); }
