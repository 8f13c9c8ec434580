// Runs every acceptance criterion and prints one line per criterion.
// Exit status is 0 only if all pass. Pass --json for the full report.
#include <cstdio>
#include <cstring>
#include <iostream>

#include "sdg/verify.hpp"

int main(int argc, char** argv) {
  const bool json = argc > 1 && std::strcmp(argv[1], "--json") == 0;
  bool all = true;
  for (int id : sdg::verify::suite("all")) {
    const sdg::verify::Report r = sdg::verify::run(id);
    all = all && r.pass;
    std::printf("criterion %2d %-40s %s  (%.1f s)\n", r.id, r.name.c_str(), r.pass ? "PASS" : "FAIL", r.seconds);
    if (json || !r.pass) std::cout << "    " << sdg::verify::to_json(r).dump() << "\n";
    std::fflush(stdout);
  }
  std::printf("%s\n", all ? "ALL PASS" : "SOME CRITERIA FAILED");
  return all ? 0 : 1;
}
