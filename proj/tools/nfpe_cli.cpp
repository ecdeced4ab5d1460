#include "nfpe/cli.hpp"

int main(int argc, char** argv) { return nfpe::run_cli(argc, argv); }
