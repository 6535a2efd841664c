#include "illusory/cli.hpp"

int main(int argc, char** argv) { return illusory::run_main(argc, argv); }
