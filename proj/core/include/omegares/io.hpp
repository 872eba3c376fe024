#pragma once

#include "omegares/fincat.hpp"
#include "omegares/groups.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <stdexcept>
#include <string>

namespace omegares {

using Json = nlohmann::json;

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Json read_json_file(const std::filesystem::path& path);

// {"perm_generators": [[[0,1,2],[3,4]], ...]}   generators as lists of 0-based cycles
// {"table": [[...], ...]}
// {"named": "C6" | "S3" | "A5" | "D8" | "Q8" | "C2xC2" | ...}
FinGroup group_from_json(const Json& j, GroupOptions opts = {});
// parses names like C4, S3, A4, D6 (dihedral of order 6), Q8, and products joined by 'x'
FinGroup named_group(const std::string& name, GroupOptions opts = {});

// {"objects": [...], "morphisms": [{"id","src","tgt"}], "identity": {obj: id}, "compose": [[g,f,gf], ...]}
CategoryPtr category_from_json(const Json& j);
Json category_to_json(const FinCategory& c);

// {"objects": {src_obj: tgt_obj}, "morphisms": {src_id: tgt_id}}
CatFunctor functor_from_json(const Json& j, CategoryPtr source, CategoryPtr target);

// {"dims": {obj: n}, "action": {id: [[...rows...]]}}; missing identities default to I
CatModule module_from_json(const Json& j, CategoryPtr cat, std::uint32_t p);
Json module_to_json(const CatModule& m);

Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j, std::uint32_t p, std::size_t rows, std::size_t cols);

}  // namespace omegares
