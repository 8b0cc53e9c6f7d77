#include "semirigid/cli.hpp"

int main(int argc, char** argv) { return semirigid::cli::main(argc, argv); }
