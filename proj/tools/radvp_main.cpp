#include "radvp/cli.hpp"

int main(int argc, char** argv) { return radvp::cli_main(argc, argv); }
