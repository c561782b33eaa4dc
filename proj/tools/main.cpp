#include "sspde/cli.hpp"

int main(int argc, char** argv) { return sspde::cli::run(argc, argv); }
