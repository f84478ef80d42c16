#include "radlabel/cli.hpp"

int main(int argc, char** argv) { return radlabel::cli::run(argc, argv); }
