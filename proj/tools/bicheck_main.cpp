#include <iostream>

#include "bi/report.hpp"

int main(int argc, char** argv) {
  return bi::run_cli(argc, argv, std::cout, std::cerr);
}
