#include "critgraph/cli.hpp"

int main(int argc, char** argv) { return critgraph::cli::run(argc, argv); }
