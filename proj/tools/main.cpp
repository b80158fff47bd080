#include "cli.hpp"

int main(int argc, char** argv) { return qmon::cli::run(argc, argv); }
