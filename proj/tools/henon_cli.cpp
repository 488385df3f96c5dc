#include "henon/cli.hpp"

int main(int argc, char** argv) { return henon::run_cli(argc, argv); }
