#include "prefshare/cli.hpp"

int main(int argc, char** argv) { return prefshare::cli::run(argc, argv); }
