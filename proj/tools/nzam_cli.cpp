#include "nzam/harness.hpp"

int main(int argc, char** argv) { return nzam::run_cli(argc, argv); }
