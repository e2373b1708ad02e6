#include "sausage/commands.hpp"

int main(int argc, char** argv) { return sausage::cli::run(argc, argv); }
