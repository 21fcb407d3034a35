#include "fcgle/commands.hpp"

int main(int argc, char** argv) { return fcgle::cli::run_cli(argc, argv); }
