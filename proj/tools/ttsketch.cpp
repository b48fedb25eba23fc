#include "cli/app.hpp"

int main(int argc, char** argv) { return ttsketch::cli::run(argc, argv); }
