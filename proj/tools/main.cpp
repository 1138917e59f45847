#include "cli.hpp"

int main(int argc, char** argv) { return riskbound::cli::run(argc, argv); }
