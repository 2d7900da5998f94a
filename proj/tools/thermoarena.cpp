#include "cli.hpp"

int main(int argc, char** argv) { return thermoarena::cli::run(argc, argv); }
