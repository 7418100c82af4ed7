#include "zgkh/cli.hpp"

int main(int argc, char** argv) { return zgkh::cli::main(argc, argv); }
