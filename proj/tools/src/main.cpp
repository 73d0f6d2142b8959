#include "gasket/cli/run.hpp"

int main(int argc, char** argv) { return gasket::cli::main_entry(argc, argv); }
