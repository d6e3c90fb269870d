#include "anisonorm/cli.hpp"

int main(int argc, char** argv) { return anisonorm::run_cli(argc, argv); }
