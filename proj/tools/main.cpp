#include "swinglab/cli.hpp"

int main(int argc, char** argv) { return swinglab::cli::main(argc, argv); }
