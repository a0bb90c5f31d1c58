#include "hybent/cli.hpp"

int main(int argc, char** argv) { return hybent::cli::run(argc, argv); }
