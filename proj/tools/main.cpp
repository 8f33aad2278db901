#include "evifuse/cli.hpp"

int main(int argc, char** argv) { return evifuse::cli::run(argc, argv); }
