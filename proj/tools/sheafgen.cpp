#include <iostream>
#include <sheafgen/cli.hpp>

int main(int argc, char** argv) {
  return sheafgen::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
