#include "qsflat/cli.hpp"

int main(int argc, char** argv) { return qsflat::cli::run(argc, argv); }
