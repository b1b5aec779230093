#include "finqa/cli.hpp"

int main(int argc, char** argv) { return finqa::cli::run(argc, argv); }
