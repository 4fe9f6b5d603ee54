#include "cli.h"

int main(int argc, char** argv) { return radtex::cli::run(argc, argv); }
