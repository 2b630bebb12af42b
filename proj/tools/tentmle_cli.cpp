#include "tentmle/cli.hpp"

int main(int argc, char** argv) { return tentmle::cli::run(argc, argv); }
