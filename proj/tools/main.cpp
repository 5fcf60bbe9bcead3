#include "cli.hpp"
int main(int argc, char** argv) { return spca::cli_run(argc, argv); }
