#include "afs/cli.hpp"

int main(int argc, char** argv) { return afs::cli::main(argc, argv); }
