#include "gupsim/cli.hpp"

int main(int argc, char** argv) { return gupsim::cli::run(argc, argv); }
