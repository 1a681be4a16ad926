#include "varlag/cli.hpp"

int main(int argc, char** argv) { return varlag::cli::run(argc, argv); }
