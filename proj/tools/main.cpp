#include "cli.hpp"

int main(int argc, char** argv) { return g2kern::cli::run(argc, argv); }
