// Regenerates the bundled case/load files under data/ from the programmatic
// fixture definitions. Usage: ucs_gen_data <output-dir>

#include <fstream>
#include <iostream>
#include <string>

#include "ucs/caseio.hpp"
#include "ucs/fixtures.hpp"

namespace {

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "cannot write " << path << "\n";
    std::exit(1);
  }
  out << content;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: ucs_gen_data <output-dir>\n";
    return 2;
  }
  const std::string dir = argv[1];
  using namespace ucs;

  write_file(dir + "/fix2.json", serialize_case(fixtures::make_fix2()));
  write_file(dir + "/fix2.loads", serialize_loads(fixtures::fix2_loads()));
  write_file(dir + "/fixa.json", serialize_case(fixtures::make_fixa()));
  write_file(dir + "/fixa.loads", serialize_loads(fixtures::fixa_loads()));
  write_file(dir + "/fix6.json", serialize_case(fixtures::make_fix6()));
  write_file(dir + "/fix6.loads", serialize_loads(fixtures::fix6_loads()));
  write_file(dir + "/fix39.json", serialize_case(fixtures::make_fix39()));
  write_file(dir + "/fix39.loads", serialize_loads(fixtures::fix39_loads()));

  // Small batch-experiment configs; relative paths resolve against the
  // config file's own directory.
  write_file(dir + "/bench_fixa.json", R"({
  "case": "fixa.json",
  "nominal_loads": "fixa.loads",
  "r_values": [0.2],
  "samples": 3,
  "methods": ["single", "multi"],
  "seed": 11,
  "oracle": true
}
)");
  write_file(dir + "/bench_fix39.json", R"({
  "case": "fix39.json",
  "nominal_loads": "fix39.loads",
  "r_values": [0.2, 0.5],
  "samples": 5,
  "methods": ["single", "multi", "region"],
  "seed": 11,
  "oracle": false
}
)");
  std::cout << "fixture data written to " << dir << "\n";
  return 0;
}
