#include "synthprior/cli.hpp"

int main(int argc, char** argv) { return synthprior::cli::run(argc, argv); }
