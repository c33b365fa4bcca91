#include "reot/cli.hpp"

int main(int argc, char** argv) { return reot::run_cli(argc, argv); }
