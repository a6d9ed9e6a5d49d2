#include "gradepipe/cli.hpp"

int main(int argc, char** argv) { return gradepipe::cli_main(argc, argv); }
