#include "hetcycle/cli.hpp"

int main(int argc, char** argv) { return hetcycle::main_entry(argc, argv); }
