#include "avgdiff/cli.hpp"

int main(int argc, char** argv) { return avgdiff::cli_main(argc, argv); }
