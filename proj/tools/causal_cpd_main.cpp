#include "cli.hpp"

int main(int argc, char** argv) { return ccpd::cli::run(argc, argv); }
