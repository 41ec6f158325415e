#include "commands.hpp"

int main(int argc, char** argv) { return fracdeblur::cli::run(argc, argv); }
