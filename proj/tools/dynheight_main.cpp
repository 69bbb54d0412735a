#include "cli.hpp"

int main(int argc, char** argv) { return dynheight::cli::main(argc, argv); }
