#include "compo/cli.hpp"

int main(int argc, char** argv) { return compo::cli_main(argc, argv); }
