#include "cli.hpp"

int main(int argc, char** argv) { return chainpay::run_cli(argc, argv); }
