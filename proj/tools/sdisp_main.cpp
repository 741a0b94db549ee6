#include "seasonal_dispersal/cli.hpp"

int main(int argc, char** argv) { return sdisp::dispatch(argc, argv); }
