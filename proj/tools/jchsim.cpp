// jchsim: command-line driver for the JCH experiment families.

#include "jch/cli/app.hpp"

int main(int argc, char** argv) { return jch::cli::main(argc, argv); }
