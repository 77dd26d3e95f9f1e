#include "hyperdolphin/cli.hpp"

int main(int argc, char** argv) { return hyperdolphin::cli_main(argc, argv); }
