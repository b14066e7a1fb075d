#include "cli.hpp"

int main(int argc, char** argv) { return uniformizer::cli::run(argc, argv); }
