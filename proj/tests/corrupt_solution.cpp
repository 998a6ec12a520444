// Adds 1e-3 to every surface value of a stored solution.
#include "ehdwave/io.hpp"

#include <iostream>

int main(int argc, char** argv) {
  if (argc != 3) {
    std::cerr << "usage: corrupt_solution IN OUT\n";
    return 1;
  }
  using namespace ehdwave::io;
  json j = read_json(argv[1]);
  ehdwave::TraceD t = trace_from_json(j["t1"]);
  t.array() += 1e-3;
  j["t1"] = trace_to_json(t);
  write_json(argv[2], j);
}
