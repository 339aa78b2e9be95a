#include "calcforge/cli.hpp"

int main(int argc, char** argv) { return calcforge::cli::run(argc, argv); }
