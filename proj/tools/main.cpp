#include <cstdlib>
#include <iostream>
#include <map>
#include <string>

#include "cli.hpp"

int main(int argc, char** argv) {
  std::map<std::string, std::string> env;
  if (const char* threads = std::getenv("ARAKELAB_THREADS")) env["ARAKELAB_THREADS"] = threads;
  return arakelab::cli::main_entry(argc, argv, env, std::cout, std::cerr);
}
