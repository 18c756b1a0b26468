#include "randsplit/cli.hpp"

int main(int argc, char** argv) { return randsplit::cli_main(argc, argv); }
