#include "omegares/io.hpp"

#include <fstream>
#include <map>

namespace omegares {

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

namespace {

Permutation perm_from_cycles(const Json& cycles, std::size_t degree) {
  Permutation p(degree);
  for (std::size_t i = 0; i < degree; ++i) p[i] = static_cast<std::uint32_t>(i);
  for (const auto& cyc : cycles) {
    std::vector<std::uint32_t> pts = cyc.get<std::vector<std::uint32_t>>();
    for (std::size_t i = 0; i < pts.size(); ++i) p[pts[i]] = pts[(i + 1) % pts.size()];
  }
  return p;
}

std::size_t parse_count(const std::string& s, const std::string& whole) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
    throw ParseError("bad group name '" + whole + "'");
  return std::stoul(s);
}

}  // namespace

FinGroup named_group(const std::string& name, GroupOptions opts) {
  auto x = name.find('x');
  if (x != std::string::npos)
    return direct_product(named_group(name.substr(0, x), opts), named_group(name.substr(x + 1), opts));
  if (name == "Q8") return quaternion_group();
  if (name.size() < 2) throw ParseError("bad group name '" + name + "'");
  std::size_t n = parse_count(name.substr(1), name);
  switch (name[0]) {
    case 'C': return cyclic_group(n);
    case 'S': return symmetric_group(n);
    case 'A': return alternating_group(n);
    case 'D':
      if (n % 2 || n < 2) throw ParseError("dihedral groups are named by their even order: '" + name + "'");
      return dihedral_group(n / 2);
    default: throw ParseError("bad group name '" + name + "'");
  }
}

FinGroup group_from_json(const Json& j, GroupOptions opts) {
  try {
    if (j.contains("named")) return named_group(j.at("named").get<std::string>(), opts);
    if (j.contains("table")) return FinGroup(j.at("table").get<std::vector<std::vector<Elem>>>());
    if (j.contains("perm_generators")) {
      std::uint32_t degree = 0;
      for (const auto& g : j.at("perm_generators"))
        for (const auto& cyc : g)
          for (const auto& pt : cyc) degree = std::max(degree, pt.get<std::uint32_t>() + 1);
      std::vector<Permutation> gens;
      for (const auto& g : j.at("perm_generators")) gens.push_back(perm_from_cycles(g, degree));
      return from_permutations(gens, opts);
    }
  } catch (const Json::exception& e) {
    throw ParseError(std::string("group: ") + e.what());
  }
  throw ParseError("group needs one of 'named', 'table', 'perm_generators'");
}

CategoryPtr category_from_json(const Json& j) {
  try {
    std::vector<std::string> objs = j.at("objects").get<std::vector<std::string>>();
    std::map<std::string, Obj> obj_index;
    for (Obj i = 0; i < objs.size(); ++i)
      if (!obj_index.emplace(objs[i], i).second) throw ParseError("duplicate object '" + objs[i] + "'");
    std::vector<MorphismRecord> mors;
    std::map<std::string, Mor> mor_index;
    for (const auto& m : j.at("morphisms")) {
      std::string id = m.at("id").get<std::string>();
      auto s = obj_index.find(m.at("src").get<std::string>());
      auto t = obj_index.find(m.at("tgt").get<std::string>());
      if (s == obj_index.end() || t == obj_index.end()) throw ParseError("morphism '" + id + "' has unknown endpoints");
      if (!mor_index.emplace(id, static_cast<Mor>(mors.size())).second) throw ParseError("duplicate morphism '" + id + "'");
      mors.push_back({id, s->second, t->second});
    }
    auto mor = [&](const std::string& id) {
      auto it = mor_index.find(id);
      if (it == mor_index.end()) throw ParseError("unknown morphism '" + id + "'");
      return it->second;
    };
    std::vector<Mor> ids(objs.size());
    std::vector<bool> have(objs.size(), false);
    for (const auto& [o, id] : j.at("identity").items()) {
      auto it = obj_index.find(o);
      if (it == obj_index.end()) throw ParseError("identity for unknown object '" + o + "'");
      ids[it->second] = mor(id.get<std::string>());
      have[it->second] = true;
    }
    for (Obj i = 0; i < objs.size(); ++i)
      if (!have[i]) throw ParseError("object '" + objs[i] + "' has no identity");
    std::vector<std::array<Mor, 3>> comp;
    if (j.contains("compose"))
      for (const auto& t : j.at("compose")) {
        auto v = t.get<std::vector<std::string>>();
        if (v.size() != 3) throw ParseError("compose entries are [g, f, g o f]");
        comp.push_back({mor(v[0]), mor(v[1]), mor(v[2])});
      }
    return make_category(FinCategory(std::move(objs), std::move(mors), std::move(ids), comp));
  } catch (const Json::exception& e) {
    throw ParseError(std::string("category: ") + e.what());
  }
}

Json category_to_json(const FinCategory& c) {
  Json j;
  j["objects"] = Json::array();
  for (Obj o = 0; o < c.num_objects(); ++o) j["objects"].push_back(c.object_name(o));
  j["morphisms"] = Json::array();
  for (Mor f = 0; f < c.num_morphisms(); ++f)
    j["morphisms"].push_back(
        {{"id", c.morphism(f).name}, {"src", c.object_name(c.src(f))}, {"tgt", c.object_name(c.tgt(f))}});
  j["identity"] = Json::object();
  for (Obj o = 0; o < c.num_objects(); ++o) j["identity"][c.object_name(o)] = c.morphism(c.identity(o)).name;
  j["compose"] = Json::array();
  for (Mor g = 0; g < c.num_morphisms(); ++g)
    for (Mor f = 0; f < c.num_morphisms(); ++f)
      if (c.tgt(f) == c.src(g) && !c.is_identity(f) && !c.is_identity(g))
        j["compose"].push_back({c.morphism(g).name, c.morphism(f).name, c.morphism(c.compose(g, f)).name});
  return j;
}

CatFunctor functor_from_json(const Json& j, CategoryPtr source, CategoryPtr target) {
  try {
    std::vector<Obj> om(source->num_objects());
    std::vector<bool> have_o(om.size(), false);
    for (const auto& [a, b] : j.at("objects").items()) {
      auto s = source->find_object(a);
      auto t = target->find_object(b.get<std::string>());
      if (!s || !t) throw ParseError("functor object entry '" + a + "' does not resolve");
      om[*s] = *t;
      have_o[*s] = true;
    }
    std::vector<Mor> mm(source->num_morphisms());
    std::vector<bool> have_m(mm.size(), false);
    for (const auto& [a, b] : j.at("morphisms").items()) {
      auto s = source->find_morphism(a);
      auto t = target->find_morphism(b.get<std::string>());
      if (!s || !t) throw ParseError("functor morphism entry '" + a + "' does not resolve");
      mm[*s] = *t;
      have_m[*s] = true;
    }
    for (Obj o = 0; o < om.size(); ++o)
      if (!have_o[o]) throw ParseError("functor misses object '" + source->object_name(o) + "'");
    for (Mor f = 0; f < mm.size(); ++f) {
      if (have_m[f]) continue;
      // identities may be left implicit
      if (source->is_identity(f)) {
        mm[f] = target->identity(om[source->src(f)]);
        continue;
      }
      throw ParseError("functor misses morphism '" + source->morphism(f).name + "'");
    }
    return CatFunctor(std::move(source), std::move(target), std::move(om), std::move(mm));
  } catch (const Json::exception& e) {
    throw ParseError(std::string("functor: ") + e.what());
  }
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) rows.push_back(std::vector<Residue>(m.row(i).begin(), m.row(i).end()));
  return rows;
}

Matrix matrix_from_json(const Json& j, std::uint32_t p, std::size_t rows, std::size_t cols) {
  Matrix m(p, rows, cols);
  if (rows == 0 || cols == 0) return m;
  auto v = j.get<std::vector<std::vector<long long>>>();
  if (v.size() != rows) throw ParseError("matrix has the wrong number of rows");
  PrimeField k(p);
  for (std::size_t i = 0; i < rows; ++i) {
    if (v[i].size() != cols) throw ParseError("matrix has the wrong number of columns");
    for (std::size_t c = 0; c < cols; ++c) m(i, c) = k.from_int(v[i][c]);
  }
  return m;
}

CatModule module_from_json(const Json& j, CategoryPtr cat, std::uint32_t p) {
  try {
    std::vector<std::size_t> dims(cat->num_objects(), 0);
    for (const auto& [o, d] : j.at("dims").items()) {
      auto c = cat->find_object(o);
      if (!c) throw ParseError("module dimension for unknown object '" + o + "'");
      dims[*c] = d.get<std::size_t>();
    }
    std::vector<Matrix> act(cat->num_morphisms());
    std::vector<bool> have(act.size(), false);
    if (j.contains("action"))
      for (const auto& [id, mj] : j.at("action").items()) {
        auto f = cat->find_morphism(id);
        if (!f) throw ParseError("module action for unknown morphism '" + id + "'");
        act[*f] = matrix_from_json(mj, p, dims[cat->tgt(*f)], dims[cat->src(*f)]);
        have[*f] = true;
      }
    for (Mor f = 0; f < act.size(); ++f) {
      if (have[f]) continue;
      if (cat->is_identity(f)) {
        act[f] = Matrix::identity(p, dims[cat->src(f)]);
        continue;
      }
      if (dims[cat->src(f)] == 0 || dims[cat->tgt(f)] == 0) {
        act[f] = Matrix(p, dims[cat->tgt(f)], dims[cat->src(f)]);
        continue;
      }
      throw ParseError("module misses the action of '" + cat->morphism(f).name + "'");
    }
    return CatModule(std::move(cat), p, std::move(dims), std::move(act));
  } catch (const Json::exception& e) {
    throw ParseError(std::string("module: ") + e.what());
  }
}

Json module_to_json(const CatModule& m) {
  const auto& c = *m.category();
  Json j;
  j["prime"] = m.prime();
  j["dims"] = Json::object();
  for (Obj o = 0; o < c.num_objects(); ++o) j["dims"][c.object_name(o)] = m.dim(o);
  j["action"] = Json::object();
  for (Mor f = 0; f < c.num_morphisms(); ++f)
    if (!c.is_identity(f)) j["action"][c.morphism(f).name] = matrix_to_json(m.action(f));
  return j;
}

}  // namespace omegares
