#include "sdg/app.hpp"

int main(int argc, char** argv) { return sdg::run_cli(argc, argv); }
