#include "copmark/cli.hpp"

int main(int argc, char** argv) { return copmark::run_cli(argc, argv); }
