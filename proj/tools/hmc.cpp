#include "hmc/cli/app.hpp"

int main(int argc, char** argv) { return hmc::cli::main(argc, argv); }
