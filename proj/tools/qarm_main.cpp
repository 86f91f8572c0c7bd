#include "qarm/cli.hpp"

int main(int argc, char** argv) { return qarm::main_entry(argc, argv); }
