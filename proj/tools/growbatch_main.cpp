#include "growbatch/experiment.hpp"

int main(int argc, char** argv) { return growbatch::run_cli(argc, argv); }
