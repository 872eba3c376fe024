#include "commands.hpp"

#include "omegares/io.hpp"
#include "omegares/kan.hpp"
#include "omegares/omega.hpp"
#include "omegares/torus.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>

namespace omegares::cli {

namespace {

struct JobConfig {
  std::string command;
  std::string input;
  std::optional<std::uint32_t> prime;
  std::optional<std::size_t> degree;
  std::optional<std::size_t> level;
  std::uint64_t seed = 0;
  bool strict = false;
  std::string format = "tsv";
  std::size_t threads = 1;
  // command specific
  std::vector<std::string> targets;
  bool complete = false;
  std::uint32_t sullivan_p = 0;
  std::size_t sullivan_m = 0;
  std::optional<std::size_t> sullivan_level;
  std::optional<std::size_t> rank;
  std::string action;
  std::optional<std::size_t> character;
  bool base = false;
};

// thrown for hard errors that should exit with 1 and a message
struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Json new_doc(const JobConfig& cfg) {
  Json doc;
  doc["command"] = cfg.command;
  doc["version"] = kVersion;
  doc["status"] = "ok";
  doc["parameters"] = Json::object();
  doc["notes"] = Json::array();
  return doc;
}

void add_betti(Json& doc, const std::vector<std::size_t>& dims, const std::vector<bool>& stable) {
  doc["betti"] = Json::array();
  for (std::size_t d = 0; d < dims.size(); ++d)
    doc["betti"].push_back({{"degree", d}, {"dim", dims[d]}, {"stable", stable[d]}});
}

void add_betti(Json& doc, const std::vector<DegreeValue>& v) {
  std::vector<std::size_t> dims;
  std::vector<bool> stable;
  for (const auto& x : v) {
    dims.push_back(x.value);
    stable.push_back(x.stable);
  }
  add_betti(doc, dims, stable);
}

std::string plain(const Json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

void render_tsv(const Json& doc, std::ostream& out) {
  out << "# omegares " << doc["command"].get<std::string>() << " " << doc["version"].get<std::string>() << "\n";
  for (const auto& [k, v] : doc["parameters"].items()) out << "# " << k << ": " << plain(v) << "\n";
  out << "# status: " << doc["status"].get<std::string>() << "\n";
  if (doc.contains("reason")) out << "# reason: " << doc["reason"].get<std::string>() << "\n";
  for (const auto& n : doc["notes"]) out << "# " << n.get<std::string>() << "\n";
  if (doc.contains("certificate") && doc["certificate"].contains("digest"))
    out << "# certificate digest: " << doc["certificate"]["digest"].get<std::string>() << "\n";
  if (doc.contains("verdicts")) {
    out << "axiom\tdegree\tpass\n";
    for (const auto& v : doc["verdicts"])
      out << v["axiom"].get<std::string>() << "\t" << v["degree"].get<std::size_t>() << "\t"
          << (v["pass"].get<bool>() ? "true" : "false") << "\n";
  }
  if (doc.contains("betti")) {
    out << "degree\tdim\tstable\n";
    std::string summary;
    for (const auto& r : doc["betti"]) {
      out << r["degree"].get<std::size_t>() << "\t" << r["dim"].get<std::size_t>() << "\t"
          << (r["stable"].get<bool>() ? "true" : "false") << "\n";
      if (!summary.empty()) summary += ", ";
      summary += std::to_string(r["degree"].get<std::size_t>()) + ":" + std::to_string(r["dim"].get<std::size_t>());
    }
    out << "# betti: " << summary << "\n";
  }
}

std::uint32_t need_prime(const JobConfig& cfg) {
  if (!cfg.prime) throw Failure("--prime is required for " + cfg.command);
  return *cfg.prime;
}

void note(Json& doc, const std::string& s) { doc["notes"].push_back(s); }

Json certificate_json(const AxiomReport& r) {
  Json c = report_to_json(r);
  c["digest"] = fnv1a(c.dump());
  return c;
}

FinGroup load_group(const std::string& input) {
  if (std::filesystem::exists(input)) {
    Json j = read_json_file(input);
    return group_from_json(j.contains("group") ? j.at("group") : j);
  }
  return named_group(input);
}

// ---- commands

int cmd_group(const JobConfig& cfg, Json& doc) {
  const std::uint32_t p = need_prime(cfg);
  const std::size_t n = cfg.degree.value_or(5);
  FinGroup g = load_group(cfg.input);
  doc["parameters"] = {{"input", cfg.input}, {"prime", p}, {"degree", n}, {"seed", cfg.seed}, {"strict", cfg.strict}};
  auto sys = group_loop_system(g, p);
  note(doc, "|G| = " + std::to_string(g.order()) + ", |O^p(G)| = " + std::to_string(p_residual(g, p).order()) +
                ", |pi| = " + std::to_string(sys.group().order()));
  BuildOptions opts;
  opts.seed = cfg.seed;
  opts.strict = cfg.strict;
  auto st = build_omega_resolution(sys, group_ring_target(), n - 1, opts);
  auto b = st.betti();
  add_betti(doc, b, std::vector<bool>(b.size(), true));
  if (st.certificate) {
    doc["certificate"] = certificate_json(*st.certificate);
    if (!st.certificate->all_pass()) throw Failure("internal check failed: the built complex violates an axiom");
  }
  return kSuccess;
}

int cmd_category(const JobConfig& cfg, Json& doc) {
  Json j = read_json_file(cfg.input);
  const std::size_t n = cfg.degree.value_or(5);
  doc["parameters"] = {{"input", cfg.input}, {"degree", n}, {"seed", cfg.seed}, {"strict", cfg.strict}};
  std::optional<OmegaSystem> sys;
  try {
    sys = system_from_json(j, cfg.prime);
  } catch (const OmegaSystemError& e) {
    doc["status"] = "refused";
    doc["reason"] = e.what();
    return kRefusal;
  }
  doc["parameters"]["prime"] = sys->prime();
  std::vector<Obj> x;
  if (sys->backend() == Backend::Group) {
    x = group_ring_target();
  } else if (cfg.targets.empty()) {
    for (Obj o = 0; o < sys->target()->num_objects(); ++o) x.push_back(o);
  } else {
    for (const auto& name : cfg.targets) {
      auto o = sys->target()->find_object(name);
      if (!o) throw Failure("unknown target object " + name);
      x.push_back(*o);
    }
  }
  Json names = Json::array();
  for (auto o : x) names.push_back(sys->target()->object_name(o));
  doc["parameters"]["target"] = names;
  BuildOptions opts;
  opts.seed = cfg.seed;
  opts.strict = cfg.strict;
  try {
    auto st = build_omega_resolution(*sys, x, n - 1, opts);
    auto b = st.betti();
    add_betti(doc, b, std::vector<bool>(b.size(), true));
    note(doc, "resolution length " + std::to_string(st.length()));
    if (st.certificate) {
      doc["certificate"] = certificate_json(*st.certificate);
      if (!st.certificate->all_pass()) throw Failure("internal check failed: the built complex violates an axiom");
    }
  } catch (const OmegaRefusal& e) {
    doc["status"] = "refused";
    doc["reason"] = e.what();
    auto cert = perfectness_certificate(*sys);
    note(doc, "perfectness verdict: " + to_string(cert.verdict));
    return kRefusal;
  }
  return kSuccess;
}

Json verdicts_json(const AxiomReport& r) {
  Json v = Json::array();
  for (const auto& x : r.verdicts) {
    Json e{{"axiom", to_string(x.axiom)}, {"degree", x.degree}, {"pass", x.pass}};
    v.push_back(e);
  }
  return v;
}

int check_sullivan(const JobConfig& cfg, const Json& spec, Json& doc) {
  const std::uint32_t p = spec.at("prime").get<std::uint32_t>();
  const std::size_t m = spec.at("m").get<std::size_t>();
  const std::size_t level = cfg.level.value_or(spec.value("level", std::size_t{3}));
  doc["parameters"] = {{"input", cfg.input}, {"prime", p}, {"m", m}, {"level", level}};
  auto rep = sullivan_complex(p, m, level);
  const std::size_t top = 2 * rep.pieces;
  Json v = Json::array();
  v.push_back({{"axiom", to_string(Axiom::Complex)}, {"degree", top}, {"pass", rep.squares_to_zero && rep.equivariant}});
  // terms kT (x) chi^i are projective over kGamma since p does not divide |H|
  v.push_back({{"axiom", to_string(Axiom::Projective)}, {"degree", top}, {"pass", true}});
  v.push_back({{"axiom", to_string(Axiom::PushforwardExact)},
               {"degree", rep.coinvariant_degree.value_or(top)},
               {"pass", !rep.coinvariant_degree.has_value()}});
  v.push_back({{"axiom", to_string(Axiom::HomologyPulledBack)},
               {"degree", rep.h_nontrivial_degree.value_or(top)},
               {"pass", rep.t_trivial && !rep.h_nontrivial_degree}});
  doc["verdicts"] = v;
  add_betti(doc, rep.betti);
  note(doc, "checked on classes stable from level " + std::to_string(level - 1) + " to " + std::to_string(level));
  Json cert{{"verdicts", v}, {"stable", rep.stable()}};
  cert["digest"] = fnv1a(cert.dump());
  doc["certificate"] = cert;
  bool pass = rep.omega_resolution() && rep.squares_to_zero && rep.equivariant;
  if (!pass) doc["status"] = "failed";
  return pass ? kSuccess : kRefusal;
}

int cmd_check(const JobConfig& cfg, Json& doc) {
  Json j = read_json_file(cfg.input);
  if (j.contains("sullivan")) return check_sullivan(cfg, j.at("sullivan"), doc);
  auto sys = system_from_json(j, cfg.prime);
  auto cx = complex_from_json(j.at("complex"), sys.source(), sys.prime());
  const std::size_t n = cfg.degree.value_or(cx.length());
  doc["parameters"] = {{"input", cfg.input}, {"prime", sys.prime()}, {"degree", n}, {"complete", cfg.complete}};
  auto rep = check_omega_axioms(sys, cx, n, cfg.complete);
  doc["verdicts"] = verdicts_json(rep);
  doc["certificate"] = certificate_json(rep);
  for (const auto& v : rep.verdicts) {
    if (!v.witness) continue;
    std::string w = "witness for " + to_string(v.axiom) + " in degree " + std::to_string(v.witness->degree) +
                    ": object " + v.witness->object;
    if (!v.witness->morphism.empty()) w += ", morphism " + v.witness->morphism;
    if (!v.witness->detail.empty()) w += ", " + v.witness->detail;
    note(doc, w);
  }
  if (!rep.all_pass()) {
    doc["status"] = "failed";
    return kRefusal;
  }
  return kSuccess;
}

void stability_notes(const JobConfig& cfg, Json& doc, const std::vector<DegreeValue>& v) {
  std::string unstable;
  for (const auto& x : v)
    if (!x.stable) unstable += (unstable.empty() ? "" : ",") + std::to_string(x.degree);
  if (unstable.empty()) return;
  note(doc, "warning: degrees " + unstable + " are not stable at this level");
  if (cfg.strict) throw Failure("unstable degrees " + unstable + " (--strict)");
}

int cmd_sullivan(const JobConfig& cfg, Json& doc) {
  const std::size_t level = cfg.sullivan_level.value_or(cfg.level.value_or(3));
  doc["parameters"] = {{"prime", cfg.sullivan_p}, {"m", cfg.sullivan_m}, {"level", level}, {"strict", cfg.strict}};
  auto rep = sullivan_complex(cfg.sullivan_p, cfg.sullivan_m, level);
  add_betti(doc, rep.betti);
  note(doc, std::string("omega resolution: ") + (rep.omega_resolution() ? "yes" : "no"));
  doc["certificate"] = {{"squares_to_zero", rep.squares_to_zero},
                        {"equivariant", rep.equivariant},
                        {"parameters_ok", rep.parameters_ok},
                        {"t_trivial", rep.t_trivial},
                        {"omega_resolution", rep.omega_resolution()}};
  stability_notes(cfg, doc, rep.betti);
  if (!rep.squares_to_zero || !rep.equivariant || !rep.parameters_ok)
    throw Failure("internal check failed for the Sullivan complex");
  return kSuccess;
}

TorusExtensionGroup torus_group(const JobConfig& cfg, std::uint32_t p, std::size_t& rank, std::size_t& level) {
  if (cfg.character) {
    if (cfg.rank && *cfg.rank != 1) throw Failure("--character needs rank 1");
    rank = 1;
    level = cfg.level.value_or(3);
    return TorusExtensionGroup::cyclic_character(p, *cfg.character, level);
  }
  std::vector<TorusExtensionGroup::IntMat> gens;
  rank = cfg.rank.value_or(1);
  if (cfg.action == "-I") {
    rank = cfg.rank.value_or(2);
    TorusExtensionGroup::IntMat m(rank * rank, 0);
    for (std::size_t i = 0; i < rank; ++i) m[i * rank + i] = -1;
    gens.push_back(m);
  } else if (!cfg.action.empty()) {
    Json a = Json::parse(cfg.action);
    for (const auto& mat : a) {
      TorusExtensionGroup::IntMat m;
      for (const auto& row : mat)
        for (const auto& x : row) m.push_back(x.get<long long>());
      gens.push_back(m);
    }
    if (gens.empty()) throw Failure("--action lists no matrices");
    rank = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(gens[0].size()))));
    if (cfg.rank && *cfg.rank != rank) throw Failure("--rank disagrees with the --action matrices");
  }
  level = cfg.level.value_or(rank == 1 ? 3 : 2);
  return TorusExtensionGroup::from_matrices(p, rank, level, gens);
}

int cmd_torus(const JobConfig& cfg, Json& doc) {
  const std::uint32_t p = need_prime(cfg);
  std::size_t rank = 0, level = 0;
  auto g = torus_group(cfg, p, rank, level);
  Json params{{"prime", p}, {"rank", rank}, {"level", level}, {"order_h", g.order()}, {"seed", cfg.seed}};
  if (!cfg.action.empty()) params["action"] = cfg.action;
  if (cfg.character) params["character"] = *cfg.character;
  if (cfg.base) {
    params["base"] = true;
    doc["parameters"] = params;
    auto rep = torus_resolution(g);
    add_betti(doc, rep.homology);
    std::string co;
    for (const auto& x : rep.coinvariants) co += (co.empty() ? "" : ", ") + std::to_string(x.degree) + ":" + std::to_string(x.value);
    note(doc, "k (x)_kT D: " + co);
    doc["certificate"] = {{"h0_is_k", rep.h0_is_k},           {"t_trivial", rep.t_trivial},
                          {"coinvariants_acyclic", rep.coinvariants_acyclic},
                          {"squares_to_zero", rep.squares_to_zero}, {"equivariant", rep.equivariant},
                          {"parameters_ok", rep.parameters_ok}};
    stability_notes(cfg, doc, rep.homology);
    if (!rep.squares_to_zero || !rep.equivariant || !rep.parameters_ok)
      throw Failure("internal check failed for the torus complex");
    return kSuccess;
  }
  const std::size_t bound = cfg.degree.value_or(9);
  params["degree"] = bound;
  doc["parameters"] = params;
  auto res = finite_length_builder(g, bound, cfg.seed, {}, cfg.threads);
  add_betti(doc, res.betti);
  for (const auto& f : res.filtration) {
    std::string s = "piece W (x) Sigma^" + std::to_string(f.degree) + " D, dim W = " + std::to_string(f.dim);
    if (!f.character.empty()) {
      s += ", characters";
      for (auto c : f.character) s += " " + std::to_string(c);
    }
    note(doc, s);
  }
  Json cert{{"squares_to_zero", res.squares_to_zero},
            {"equivariant", res.equivariant},
            {"chain_maps_commute", res.chain_maps_commute},
            {"t_trivial", res.t_trivial},
            {"h_trivial", res.h_trivial},
            {"pieces_coinvariant_free", res.pieces_coinvariant_free},
            {"base_coinvariants_acyclic", res.base_coinvariants_acyclic}};
  cert["digest"] = fnv1a(cert.dump());
  doc["certificate"] = cert;
  stability_notes(cfg, doc, res.betti);
  if (!res.omega_certificate()) throw Failure("internal check failed: the builder output is not certified");
  return kSuccess;
}

int cmd_perfectness(const JobConfig& cfg, Json& doc) {
  std::optional<OmegaSystem> sys;
  doc["parameters"] = {{"input", cfg.input}};
  try {
    if (std::filesystem::exists(cfg.input)) {
      Json j = read_json_file(cfg.input);
      if (j.contains("source") || j.contains("category"))
        sys = system_from_json(j, cfg.prime);
      else
        sys = group_loop_system(load_group(cfg.input), need_prime(cfg));
    } else {
      sys = group_loop_system(named_group(cfg.input), need_prime(cfg));
    }
  } catch (const OmegaSystemError& e) {
    doc["status"] = "refused";
    doc["reason"] = e.what();
    return kRefusal;
  }
  doc["parameters"]["prime"] = sys->prime();
  auto rep = perfectness_certificate(*sys);
  Json c;
  c["backend"] = rep.backend == Backend::Group ? "group" : "bijective";
  c["verdict"] = to_string(rep.verdict);
  c["agree"] = rep.agree;
  if (rep.l1_dim) c["l1_dim"] = *rep.l1_dim;
  if (rep.direct_kernel_perfect) c["direct_kernel_perfect"] = *rep.direct_kernel_perfect;
  c["kernels"] = Json::array();
  for (const auto& k : rep.kernels) {
    Json ab = Json::array();
    for (const auto& f : k.abelianization) ab.push_back(f.str());
    c["kernels"].push_back({{"object", k.object}, {"order", k.order}, {"abelianization", ab}, {"perfect", k.perfect}});
    note(doc, "kernel at " + k.object + ": order " + std::to_string(k.order) + (k.perfect ? ", perfect" : ", not perfect"));
  }
  c["projectives"] = Json::array();
  for (const auto& v : rep.projectives) {
    c["projectives"].push_back({{"object", v.object},
                                {"pullback_projective", v.pullback_projective},
                                {"l1_dim", v.l1_dim},
                                {"verdict", to_string(v.verdict)}});
    note(doc, "F_" + v.object + ": dim L_1 = " + std::to_string(v.l1_dim) + ", " + to_string(v.verdict));
  }
  if (rep.l1_dim) note(doc, "dim L_1 theta_*(theta^* k pi) = " + std::to_string(*rep.l1_dim));
  if (rep.direct_kernel_perfect)
    note(doc, std::string("kernel of theta R-perfect: ") + (*rep.direct_kernel_perfect ? "yes" : "no"));
  note(doc, "verdict: " + to_string(rep.verdict));
  c["digest"] = fnv1a(c.dump());
  doc["certificate"] = c;
  if (!rep.agree) throw Failure("internal check failed: the perfectness criteria disagree");
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Loop-space homology through Omega-resolutions over finite categories and p-tori", "omegares"};
  app.require_subcommand(1);
  app.fallthrough();
  JobConfig cfg;
  app.add_option("--prime,-p", cfg.prime, "prime p")->check([](const std::string& s) {
    try {
      return is_prime(std::stoull(s)) ? std::string() : s + " is not prime";
    } catch (...) {
      return s + " is not a number";
    }
  });
  app.add_option("--degree,-N", cfg.degree, "degree bound N")->check(CLI::PositiveNumber);
  app.add_option("--level,-L", cfg.level, "truncation level L")->check(CLI::PositiveNumber);
  app.add_option("--seed", cfg.seed, "builder seed (0 is the canonical choice)");
  app.add_flag("--strict", cfg.strict, "extra checks; unstable degrees become errors");
  app.add_option("--format", cfg.format, "tsv or json")->check(CLI::IsMember({"tsv", "json"}));
  app.add_option("--threads", cfg.threads, "worker threads")->check(CLI::PositiveNumber);

  auto* group = app.add_subcommand("group", "loop homology of BG^_p; degrees < N");
  group->add_option("input", cfg.input, "group JSON file or name (C6, S3, Q8, C2xC2, ...)")->required();
  auto* category = app.add_subcommand("category", "Omega-resolution of an Omega-system from JSON");
  category->add_option("input", cfg.input, "system JSON")->required()->check(CLI::ExistingFile);
  category->add_option("--target", cfg.targets, "target objects generating X (bijective backend)");
  auto* check = app.add_subcommand("check", "axiom verdicts for a complex file");
  check->add_option("input", cfg.input, "complex JSON")->required()->check(CLI::ExistingFile);
  check->add_flag("--complete", cfg.complete, "check as a complete resolution of length N");
  auto* sullivan = app.add_subcommand("sullivan", "Sullivan sphere complex C_m at level L");
  sullivan->add_option("p", cfg.sullivan_p, "odd prime")->required();
  sullivan->add_option("m", cfg.sullivan_m, "order of the character, m | p - 1")->required();
  sullivan->add_option("level", cfg.sullivan_level, "truncation level (default 3)");
  auto* torus = app.add_subcommand("torus", "finite-length Omega-resolution for a p-torus extension");
  torus->add_option("--rank,-r", cfg.rank, "rank of the torus");
  torus->add_option("--action", cfg.action, "H generators as JSON integer matrices, or -I");
  torus->add_option("--character", cfg.character, "rank 1: H = C_m acting through a character of order m");
  torus->add_flag("--base", cfg.base, "report the base complex D instead of running the builder");
  auto* perfect = app.add_subcommand("perfectness", "perfectness certificate");
  perfect->add_option("input", cfg.input, "system JSON, group JSON or group name")->required();

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kSuccess : kError;
  }
  cfg.command = app.get_subcommands().front()->get_name();
  Json doc = new_doc(cfg);
  int code = kSuccess;
  try {
    if (cfg.command == "group") code = cmd_group(cfg, doc);
    else if (cfg.command == "category") code = cmd_category(cfg, doc);
    else if (cfg.command == "check") code = cmd_check(cfg, doc);
    else if (cfg.command == "sullivan") code = cmd_sullivan(cfg, doc);
    else if (cfg.command == "torus") code = cmd_torus(cfg, doc);
    else code = cmd_perfectness(cfg, doc);
  } catch (const std::exception& e) {
    err << "omegares: " << e.what() << "\n";
    return kError;
  }
  for (const auto& n : doc["notes"]) {
    const auto s = n.get<std::string>();
    if (s.rfind("warning:", 0) == 0) err << "omegares: " << s << "\n";
  }
  if (cfg.format == "json")
    out << doc.dump(2) << "\n";
  else
    render_tsv(doc, out);
  return code;
}

}  // namespace omegares::cli
