#include "hdclt/cli.hpp"

int main(int argc, char** argv) { return hdclt::cli::run(argc, argv); }
