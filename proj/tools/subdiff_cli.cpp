#include "subdiff/cli.hpp"

int main(int argc, char** argv) { return subdiff::dispatch(argc, argv); }
