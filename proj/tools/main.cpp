#include "sockverif/cli.hpp"

int main(int argc, char** argv) { return sockverif::run_cli(argc, argv); }
