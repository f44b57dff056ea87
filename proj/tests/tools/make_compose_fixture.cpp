// Regenerates tests/data/compose/*.json. The golden result comes from the
// shared-port oracle, which never calls `compose`.
#include "dirac/oracles.hpp"
#include "dirac/random.hpp"
#include "dirac/serialize.hpp"

#include <iostream>
#include <string>

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_compose_fixture <output-dir>\n";
    return 2;
  }
  const std::string dir = argv[1];
  constexpr dirac::Index u1 = 2, u2 = 2, u3 = 1;
  dirac::random::Rng rng(20260417);
  const dirac::LinearStructure da = dirac::random::dirac(rng, u1 + u2);
  const dirac::LinearStructure db = dirac::random::dirac(rng, u3 + u2);
  const dirac::LinearStructure di = dirac::oracle::cancellation_interconnection(u2);
  const dirac::LinearStructure golden = dirac::oracle::shared_port_composition(da, db, u1, u2, u3);
  dirac::write_json_file(dir + "/da.json", dirac::to_json(da));
  dirac::write_json_file(dir + "/db.json", dirac::to_json(db));
  dirac::write_json_file(dir + "/di.json", dirac::to_json(di));
  dirac::write_json_file(dir + "/golden.json", dirac::to_json(golden));
  std::cout << "golden: n=" << golden.n() << " dim=" << golden.span().dim() << " class=" << dirac::to_string(golden.class_tag())
            << '\n';
  return 0;
}
