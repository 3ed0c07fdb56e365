#include "ap/cli.hpp"

int main(int argc, char** argv) { return ap::cli::run(argc, argv); }
