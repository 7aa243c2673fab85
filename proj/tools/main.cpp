#include "rel_euler/cli.hpp"

int main(int argc, char** argv) { return rel_euler::cli::run(argc, argv); }
