#include "lacldp/cli/commands.hpp"

int main(int argc, char** argv) { return lacldp::cli::run_main(argc, argv); }
