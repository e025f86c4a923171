#include "sctsa/cli.hpp"

int main(int argc, char** argv) { return sctsa::cli::run(argc, argv); }
