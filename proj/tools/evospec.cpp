#include "evospec/cli.hpp"

int main(int argc, char** argv) { return evospec::run_cli(argc, argv); }
