#include "spintomo/cli_main.hpp"

int main(int argc, char** argv) { return spintomo::cli_main(argc, argv); }
