#include "cad/cli.hpp"

int main(int argc, char** argv) { return cad::cli::run(argc, argv); }
