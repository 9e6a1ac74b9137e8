#include "ufh/cli.hpp"

int main(int argc, char** argv) { return ufh::run(argc, argv); }
