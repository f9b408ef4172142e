#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) {
  try {
    const auto config = dirac::cli::parse_args(argc, argv, std::cout);
    if (!config) return dirac::cli::kSuccess;
    return dirac::cli::run(*config, std::cout, std::cerr);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return dirac::cli::kValidation;
  }
}
