#pragma once

#include "omegares/fincat.hpp"
#include "omegares/io.hpp"

#include <random>
#include <string>

namespace omegares::testing {

inline const std::string data_dir = OMEGARES_DATA_DIR;

inline Json fixture(const std::string& name) { return read_json_file(data_dir + "/fixtures/" + name + ".json"); }

inline CategoryPtr arrow_source(std::uint32_t p) {
  return category_from_json(fixture("arrow_with_cyclic_loop_p" + std::to_string(p)).at("source"));
}

inline CategoryPtr idempotent_pair() { return category_from_json(fixture("idempotent_pair").at("category")); }

// quotients of random free modules; cheap and always functorial
inline ModulePtr random_module(std::mt19937_64& rng, CategoryPtr cat, std::uint32_t p) {
  std::vector<Obj> gens;
  std::size_t k = 1 + rng() % 3;
  for (std::size_t i = 0; i < k; ++i) gens.push_back(static_cast<Obj>(rng() % cat->num_objects()));
  FreeModule f = free_sum(cat, gens, p);
  std::vector<std::vector<Vec>> rel(cat->num_objects());
  for (Obj o = 0; o < cat->num_objects(); ++o) {
    if (f.module->dim(o) == 0 || rng() % 2) continue;
    Vec v(f.module->dim(o));
    for (auto& x : v) x = static_cast<Residue>(rng() % p);
    rel[o].push_back(v);
  }
  auto sub = submodule_generated(*f.module, rel);
  return quotient_module(f.module, sub).module;
}

inline std::vector<ModulePtr> sample_modules(std::mt19937_64& rng, CategoryPtr cat, std::uint32_t p, int n) {
  std::vector<ModulePtr> out;
  for (int i = 0; i < n; ++i) out.push_back(random_module(rng, cat, p));
  return out;
}

}  // namespace omegares::testing
