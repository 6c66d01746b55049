#include "ckabs/cli.hpp"

int main(int argc, char** argv) { return ckabs::run_cli(argc, argv); }
