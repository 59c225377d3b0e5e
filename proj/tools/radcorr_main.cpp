#include "radcorr/cli.hpp"

int main(int argc, char** argv) { return radcorr::run(argc, argv); }
