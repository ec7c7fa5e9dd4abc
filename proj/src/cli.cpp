#include "holocorr/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"

#include "holocorr/syntax.hpp"

namespace holocorr::cli {

namespace {

using nlohmann::json;

class CapsError : public Error {
 public:
  using Error::Error;
};

json point_json(const SpherePointd& p) {
  if (const auto z = p.to_affine()) return json::array({z->real(), z->imag()});
  return "inf";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << content;
  if (!out) throw IoError("write failed for " + path);
}

AtomicMeasure load_atoms(const std::string& path) {
  std::istringstream in(read_file(path));
  return read_atoms(in);
}

// Puts "# config {...}" right after the first line of a text artifact.
std::string with_config(const std::string& text, const RunConfig& config) {
  const auto nl = text.find('\n');
  const std::string line = "# config " + to_json(config).dump() + "\n";
  if (nl == std::string::npos) return text + "\n" + line;
  return text.substr(0, nl + 1) + line + text.substr(nl + 1);
}

// Square window around the atoms, |z| clipped to 10.
RasterGrid auto_window(const AtomicMeasure& mu, int resolution) {
  double half = 0.0;
  for (const auto& a : mu.atoms) {
    if (const auto z = a.point.to_affine()) {
      half = std::max({half, std::min(std::abs(z->real()), 10.0), std::min(std::abs(z->imag()), 10.0)});
    }
  }
  half = half > 0.0 ? 1.05 * half : 1.0;
  return {-half, half, -half, half, resolution};
}

RasterGrid grid_from(const std::vector<double>& window, int resolution) {
  if (window.size() != 4) throw PreconditionError("--window needs x0,x1,y0,y1");
  return {window[0], window[1], window[2], window[3], resolution};
}

void add_common(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--workers", cfg.workers, "Worker threads (results do not depend on it)")->check(CLI::PositiveNumber);
  cmd->add_option("--max-atoms", cfg.caps.max_atoms, "Atom cap per fiber level");
  cmd->add_option("--dedup", cfg.caps.dedup_radius, "Chordal merge radius");
}

struct Gens {
  std::string text;
  bool allow_deg1 = false;
};

void add_gens(CLI::App* cmd, Gens& g) {
  cmd->add_option("--gens", g.text, "Generators, e.g. \"z^2; z^2/2\" or \"poly: y - x^2\"")->required();
  cmd->add_flag("--allow-deg1", g.allow_deg1, "Accept degree-1 generators");
}

int run_measure(std::ostream& out, RunConfig& cfg, const Gens& gens, const std::string& method, int depth,
                std::size_t samples, int burn, const std::vector<double>& base, bool force, bool allow_pruned,
                const std::string& path) {
  const GeneratorSpec spec = parse_generators(gens.text, gens.allow_deg1);
  const Correspondence f = spec.correspondence();
  const Degrees deg = degrees(f);
  out << "d_t=" << deg.dt << " d0=" << deg.d0 << " condition=" << (deg.condition ? "true" : "false") << "\n";
  if (!deg.condition && !force) {
    throw ConditionError("d0 = " + std::to_string(deg.d0) + " is not below d_t = " + std::to_string(deg.dt) +
                         " (use --force to sample anyway)");
  }
  if (base.size() != 2) throw PreconditionError("--base needs re,im");
  const SpherePointd a = SpherePointd::affine({base[0], base[1]});

  cfg.inputs["gens"] = spec.source;
  cfg.outputs["atoms"] = path;
  cfg.parameters = {{"method", method}, {"base", base}, {"force", force}};
  AtomicMeasure mu;
  if (method == "tree") {
    cfg.parameters["depth"] = depth;
    mu = boyd_tree(f, a, depth, cfg.caps, {}, cfg.workers);
    if (!mu.provenance.exact && !allow_pruned) {
      throw CapsError("atom cap pruned mass " + std::to_string(mu.provenance.pruned_mass) +
                      " (raise --max-atoms or pass --allow-pruned)");
    }
  } else {
    cfg.parameters["samples"] = samples;
    cfg.parameters["burn"] = burn;
    ChaosOptions co;
    co.burn = burn;
    co.count = samples;
    co.rng_seed = cfg.seed;
    co.dedup_radius = cfg.caps.dedup_radius;
    co.workers = cfg.workers;
    mu = chaos_sample(f, a, co);
  }
  std::ostringstream csv;
  write_atoms(csv, mu);
  write_file(path, with_config(csv.str(), cfg));
  out << "wrote " << mu.atoms.size() << " atoms to " << path << "\n";
  return Exit::ok;
}

int run_render(std::ostream& out, RunConfig&, const std::string& atoms, int res, const std::vector<double>& window,
               double gain, const std::string& path) {
  const AtomicMeasure mu = load_atoms(atoms);
  write_file(path, render_pgm(mu, grid_from(window, res), gain));
  out << "wrote " << res << "x" << res << " PGM to " << path << "\n";
  return Exit::ok;
}

int run_recur(std::ostream& out, RunConfig& cfg, const Gens& gens, const std::string& atoms, const std::string& region,
              const std::string& direction, RecurrenceOptions opt, double boundary_tol, const std::string& path) {
  const GeneratorSpec spec = parse_generators(gens.text, gens.allow_deg1);
  const Correspondence f = spec.correspondence();
  const Region r = parse_region(region).with_boundary_tol(boundary_tol);
  const AtomicMeasure mu = load_atoms(atoms);
  const auto dir = direction == "bwd" ? RecurrenceDirection::backward : RecurrenceDirection::forward;
  if (opt.witnesses) {
    const bool plain = !spec.poly_mode && std::none_of(spec.items.begin(), spec.items.end(),
                                                       [](const GeneratorItem& it) { return it.adjoint; });
    if (!plain) throw PreconditionError("--witnesses needs plain rational generators");
    opt.generators = spec.maps;
  }
  opt.seed = cfg.seed;
  opt.caps = cfg.caps;
  opt.workers = cfg.workers;

  cfg.inputs = {{"gens", spec.source}, {"atoms", atoms}, {"region", to_string(r)}};
  cfg.outputs["report"] = path;
  cfg.tolerances = {{"boundary", boundary_tol}, {"certificate_residual", 1e-6}};
  cfg.parameters = {{"direction", to_string(dir)},
                    {"horizon", opt.horizon},
                    {"min_returns", opt.min_returns},
                    {"points", opt.max_points},
                    {"witnesses", opt.witnesses},
                    {"witness_horizon", opt.witness_horizon},
                    {"witness_chain", opt.witness_max_chain}};

  const ReturnReport rep = recurrence_experiment(f, mu, r, dir, opt);
  const Correspondence g = dir == RecurrenceDirection::backward ? adjoint(f) : f;
  std::size_t checked = 0, valid = 0, chains_valid = 0;
  for (const auto& rec : rep.records) {
    for (const auto& c : rec.certificates) {
      ++checked;
      if (validate_certificate(g, rec.atom.point, r, c)) ++valid;
    }
    if (rec.chain && validate_chain(opt.generators, rec.atom.point, r, *rec.chain)) ++chains_valid;
  }
  json doc = to_json(rep, cfg);
  doc["aggregate"]["certificates_checked"] = checked;
  doc["aggregate"]["certificates_valid"] = valid;
  if (opt.witnesses) doc["aggregate"]["chains_valid"] = chains_valid;
  write_file(path, doc.dump(2) + "\n");

  const auto& agg = rep.aggregate;
  if (agg.region_mass_zero) {
    out << "no atoms in region (mu(B) ~ 0)\n";
  } else {
    out << "sampled " << agg.atoms_sampled << " atoms; fraction with >= " << opt.min_returns
        << " returns: " << agg.fraction_min_returns << "; certificates valid: " << valid << "/" << checked << "\n";
  }
  return Exit::ok;
}

json degrees_suite(const Correspondence& f, std::uint64_t seed) {
  const Degrees deg = degrees(f);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  bool conserved = true;
  for (int k = 0; k < 10; ++k) {
    const SpherePointd p = SpherePointd::from_embedding(Eigen::Vector3d(n(rng), n(rng), n(rng)));
    conserved = conserved && total_multiplicity(forward_image(f, p)) == deg.d0 &&
                total_multiplicity(backward_image(f, p)) == deg.dt;
  }
  const json adj = {{"dt", degrees(adjoint(f)).dt}, {"d0", degrees(adjoint(f)).d0}};
  return {{"dt", deg.dt},           {"d0", deg.d0},       {"condition", deg.condition},
          {"fibers_conserved", conserved}, {"adjoint", adj}, {"pass", deg.condition && conserved}};
}

int run_verify(std::ostream& out, RunConfig& cfg, const Gens& gens, const std::string& atoms,
               const std::vector<std::string>& suites, double tol, int res, const std::vector<double>& window,
               double mass_floor, int regions, const std::string& path) {
  const GeneratorSpec spec = parse_generators(gens.text, gens.allow_deg1);
  const Correspondence f = spec.correspondence();
  const AtomicMeasure mu = load_atoms(atoms);
  cfg.inputs = {{"gens", spec.source}, {"atoms", atoms}};
  cfg.outputs["verify"] = path;
  cfg.tolerances = {{"invariance", tol}, {"mass_sigmas", 3.0}};
  cfg.parameters = {{"suites", suites}, {"resolution", res}, {"mass_floor", mass_floor}, {"regions", regions}};
  if (!window.empty()) cfg.parameters["window"] = window;

  json results = json::object();
  bool all = true;
  for (const auto& s : suites) {
    json r;
    if (s == "degrees") {
      r = degrees_suite(f, cfg.seed);
      out << "degrees: d_t=" << r["dt"] << " d0=" << r["d0"] << " condition=" << r["condition"] << "\n";
    } else if (s == "invariance") {
      const InvarianceDefect d = invariance_defect(f, mu, standard_family(), {}, cfg.workers);
      r = {{"max_defect", d.max}, {"per_function", d.per_function}, {"tolerance", tol}, {"pass", d.max < tol}};
      out << "invariance: max defect " << d.max << "\n";
    } else if (s == "support") {
      const RasterGrid grid = window.empty() ? auto_window(mu, res) : grid_from(window, res);
      const SupportRaster raster = support_raster(mu, grid, mass_floor);
      const double delta = 2.0 * raster.max_cell_diagonal();
      const SupportInvarianceResult inv = support_invariance_check(f, raster, delta, {}, cfg.workers);
      json viol = json::array();
      for (std::size_t i = 0; i < inv.violations.size() && i < 20; ++i) {
        const auto& v = inv.violations[i];
        viol.push_back({{"point", point_json(v.point)}, {"kind", std::string(1, v.kind)}, {"distance", v.distance}});
      }
      r = {{"window", {grid.x0, grid.x1, grid.y0, grid.y1}},
           {"delta", delta},
           {"cells_checked", inv.checked},
           {"violations", inv.violations.size()},
           {"first_violations", viol},
           {"forward_not_contained", inv.forward_not_contained},
           {"pass", inv.violations.empty()}};
      out << "support: " << inv.violations.size() << " violations over " << inv.checked << " cells\n";
    } else if (s == "mass") {
      const auto rs = random_regions(mu, regions, cfg.seed);
      const auto checks = mass_inequality_check(f, mu, rs, {}, cfg.workers);
      json list = json::array();
      bool pass = true;
      for (std::size_t k = 0; k < rs.size(); ++k) {
        const auto& m = checks[k];
        pass = pass && m.pass();
        list.push_back({{"region", to_string(rs[k])},
                        {"mu_R", m.region},
                        {"mu_preimage", m.preimage},
                        {"mu_image", m.image},
                        {"se", {m.se_region, m.se_preimage, m.se_image}},
                        {"pass", m.pass()}});
      }
      r = {{"regions", list}, {"pass", pass}};
      out << "mass: " << std::count_if(checks.begin(), checks.end(), [](const auto& m) { return m.pass(); }) << "/"
          << checks.size() << " regions pass\n";
    } else {
      throw PreconditionError("unknown suite '" + s + "'");
    }
    all = all && r["pass"].get<bool>();
    results[s] = r;
  }
  const json doc = {{"format", "holocorr-verify"}, {"version", kVersion}, {"config", to_json(cfg)},
                    {"suites", results}, {"pass", all}};
  if (!path.empty()) write_file(path, doc.dump(2) + "\n");
  out << (all ? "PASS" : "FAIL") << "\n";
  return all ? Exit::ok : Exit::verification_failure;
}

int run_compose(std::ostream& out, RunConfig& cfg, const std::vector<std::string>& polys, const std::string& path) {
  if (polys.size() < 2) throw PreconditionError("compose needs at least two --poly");
  std::vector<Correspondence> parts;
  for (const auto& p : polys) parts.push_back(Correspondence::poly_chain({{parse_poly(p), 1}}));
  // The first --poly is the outer correspondence.
  Correspondence result = parts.back();
  for (auto it = parts.rbegin() + 1; it != parts.rend(); ++it) result = compose(*it, result);

  cfg.inputs["polys"] = [&] {
    std::string joined;
    for (const auto& p : polys) joined += (joined.empty() ? "" : " ; ") + p;
    return joined;
  }();
  if (!path.empty()) cfg.outputs["composed"] = path;
  std::ostringstream text;
  const Degrees deg = degrees(result);
  text << "# holocorr composed v1\n# dt=" << deg.dt << " d0=" << deg.d0 << "\n";
  const Correspondence chain = result.is_graph_chain() ? to_poly_chain(result) : result;
  for (const auto& factor : chain.poly_factors()) text << factor.multiplicity << " " << to_string(factor.poly) << "\n";
  if (path.empty()) {
    out << text.str();
  } else {
    write_file(path, with_config(text.str(), cfg));
    out << "wrote " << chain.poly_factors().size() << " factors to " << path << "\n";
  }
  return Exit::ok;
}

}  // namespace

json to_json(const RunConfig& config) {
  return {{"command", config.command},
          {"version", kVersion},
          {"seed", config.seed},
          {"caps", {{"max_atoms", config.caps.max_atoms}, {"dedup_radius", config.caps.dedup_radius}}},
          {"tolerances", config.tolerances},
          {"inputs", config.inputs},
          {"outputs", config.outputs},
          {"parameters", config.parameters}};
}

json to_json(const ReturnReport& report, const RunConfig& config) {
  const auto& agg = report.aggregate;
  json atoms = json::array();
  for (const auto& rec : report.records) {
    json certs = json::array();
    for (const auto& c : rec.certificates) {
      json path = json::array();
      for (const auto& s : c.path) path.push_back({{"component", s.component}, {"point", point_json(s.point)}});
      certs.push_back({{"n", c.n}, {"path", path}});
    }
    json a = {{"index", rec.atom_index},
              {"point", point_json(rec.atom.point)},
              {"weight", rec.atom.weight},
              {"returns", rec.times},
              {"boundary_returns", rec.boundary_times},
              {"unknown", rec.unknown},
              {"capped", rec.capped},
              {"certificates", certs}};
    if (rec.chain) {
      json values = json::array();
      for (const auto& v : rec.chain->values) values.push_back(point_json(v));
      a["chain"] = {{"words", rec.chain->words}, {"values", values}};
    }
    atoms.push_back(a);
  }
  return {{"format", "holocorr-return-report"},
          {"version", kVersion},
          {"config", to_json(config)},
          {"region", report.region},
          {"direction", to_string(report.direction)},
          {"horizon", report.horizon},
          {"min_returns", report.min_returns},
          {"aggregate",
           {{"atoms_in_region", agg.atoms_in_region},
            {"atoms_sampled", agg.atoms_sampled},
            {"region_mass", agg.region_mass},
            {"region_mass_zero", agg.region_mass_zero},
            {"fraction_at_least", agg.fraction_at_least},
            {"fraction_min_returns", agg.fraction_min_returns},
            {"fraction_full_chain", agg.fraction_full_chain},
            {"capped_atoms", agg.capped_atoms}}},
          {"atoms", atoms}};
}

std::string render_pgm(const AtomicMeasure& mu, const RasterGrid& grid, double gain) {
  if (!(gain > 0.0)) throw PreconditionError("render gain must be positive");
  const SupportRaster raster = support_raster(mu, grid, std::numeric_limits<double>::infinity());
  const double peak = *std::max_element(raster.mass.begin(), raster.mass.end());
  std::string out = "P5\n" + std::to_string(grid.resolution) + " " + std::to_string(grid.resolution) + "\n255\n";
  const double norm = std::log1p(gain);
  for (double m : raster.mass) {
    const double c = peak > 0.0 ? m / peak : 0.0;
    out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * std::log1p(gain * c) / norm))));
  }
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Holomorphic correspondences on the Riemann sphere: equilibrium measures and recurrence"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  RunConfig cfg;
  std::uint64_t seed = 0;

  Gens gens;
  std::string method = "chaos", out_path, atoms_path, region, direction = "fwd";
  int depth = 8, burn = 50, res = 512, regions = 20;
  std::size_t samples = 1'000'000;
  std::vector<double> base{0.7, 0.3}, window;
  bool force = false, allow_pruned = false;
  double gain = 1000.0, boundary_tol = 1e-9, tol = 1e-2, mass_floor = 0.0;
  RecurrenceOptions ropt;
  std::vector<std::string> suites{"degrees", "invariance", "support", "mass"};
  std::vector<std::string> polys;

  auto* measure = app.add_subcommand("measure", "Sample the equilibrium measure into an atom CSV");
  add_gens(measure, gens);
  add_common(measure, cfg);
  measure->add_option("--method", method, "tree or chaos")->check(CLI::IsMember({"tree", "chaos"}));
  measure->add_option("--depth", depth, "Tree depth")->check(CLI::NonNegativeNumber);
  measure->add_option("--samples", samples, "Chaos walks")->check(CLI::PositiveNumber);
  measure->add_option("--burn", burn, "Steps per chaos walk")->check(CLI::NonNegativeNumber);
  measure->add_option("--seed", seed, "RNG seed");
  measure->add_option("--base", base, "Start point re,im")->delimiter(',')->expected(2);
  measure->add_flag("--force", force, "Sample even when d0 >= d_t");
  measure->add_flag("--allow-pruned", allow_pruned, "Accept a tree measure with pruned mass");
  measure->add_option("--out", out_path, "Atom CSV")->required();

  auto* render = app.add_subcommand("render", "Log-density PGM of an atom CSV");
  render->add_option("--atoms", atoms_path)->required();
  render->add_option("--res", res, "Pixels per side")->check(CLI::Range(16, 16384));
  window = {-2, 2, -2, 2};
  render->add_option("--window", window, "x0,x1,y0,y1")->delimiter(',')->expected(4);
  render->add_option("--gain", gain, "Log scale constant K");
  render->add_option("--out", out_path, "PGM file")->required();

  auto* recur = app.add_subcommand("recur", "Recurrence experiment on sampled atoms");
  add_gens(recur, gens);
  recur->add_option("--workers", cfg.workers)->check(CLI::PositiveNumber);
  recur->add_option("--max-atoms", ropt.caps.max_atoms, "Atom cap per fiber level");
  recur->add_option("--dedup", ropt.caps.dedup_radius, "Chordal merge radius");
  recur->add_option("--atoms", atoms_path)->required();
  recur->add_option("--region", region, "Region, e.g. \"annulus 1.2 1.8 closed\"")->required();
  recur->add_option("--horizon", ropt.horizon)->check(CLI::PositiveNumber);
  recur->add_option("--min-returns", ropt.min_returns)->check(CLI::NonNegativeNumber);
  recur->add_option("--direction", direction)->check(CLI::IsMember({"fwd", "bwd"}));
  recur->add_flag("--witnesses", ropt.witnesses, "Search nested word witnesses");
  recur->add_option("--witness-horizon", ropt.witness_horizon)->check(CLI::PositiveNumber);
  recur->add_option("--witness-chain", ropt.witness_max_chain)->check(CLI::PositiveNumber);
  recur->add_option("--points", ropt.max_points, "Atoms to sample")->check(CLI::PositiveNumber);
  recur->add_option("--boundary-tol", boundary_tol)->check(CLI::NonNegativeNumber);
  recur->add_option("--seed", seed);
  recur->add_option("--out", out_path, "JSON report")->required();

  auto* verify = app.add_subcommand("verify", "Run invariance, support, mass and degree checks");
  add_gens(verify, gens);
  add_common(verify, cfg);
  verify->add_option("--atoms", atoms_path)->required();
  verify->add_option("--suite", suites, "Comma-separated suites")->delimiter(',')
      ->check(CLI::IsMember({"degrees", "invariance", "support", "mass"}));
  verify->add_option("--tol", tol, "Invariance defect tolerance");
  verify->add_option("--res", res, "Support raster cells per side")->check(CLI::Range(16, 4096));
  verify->add_option("--window", window, "Support raster x0,x1,y0,y1")->delimiter(',')->expected(4);
  verify->add_option("--mass-floor", mass_floor);
  verify->add_option("--regions", regions, "Random regions for the mass suite")->check(CLI::PositiveNumber);
  verify->add_option("--seed", seed);
  verify->add_option("--out", out_path, "JSON result");

  auto* composer = app.add_subcommand("compose", "Compose polynomial correspondences exactly");
  composer->add_option("--poly", polys, "Curve P(x, y); the first is applied last")->required();
  composer->add_option("--out", out_path);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? Exit::ok : Exit::parse_failure;
  }

  try {
    cfg.seed = seed;
    if (measure->parsed()) {
      cfg.command = "measure";
      return run_measure(out, cfg, gens, method, depth, samples, burn, base, force, allow_pruned, out_path);
    }
    if (render->parsed()) {
      cfg.command = "render";
      return run_render(out, cfg, atoms_path, res, window, gain, out_path);
    }
    if (recur->parsed()) {
      cfg.command = "recur";
      cfg.caps = ropt.caps;
      return run_recur(out, cfg, gens, atoms_path, region, direction, ropt, boundary_tol, out_path);
    }
    if (verify->parsed()) {
      cfg.command = "verify";
      if (!verify->count("--res")) res = 256;
      if (!verify->count("--window")) window.clear();
      return run_verify(out, cfg, gens, atoms_path, suites, tol, res, window, mass_floor, regions, out_path);
    }
    cfg.command = "compose";
    return run_compose(out, cfg, polys, out_path);
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return Exit::parse_failure;
  } catch (const DegreeError& e) {
    err << "degree error: " << e.what() << "\n";
    return Exit::parse_failure;
  } catch (const PreconditionError& e) {
    err << "invalid input: " << e.what() << "\n";
    return Exit::parse_failure;
  } catch (const CapsError& e) {
    err << "caps: " << e.what() << "\n";
    return Exit::caps_exceeded;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return Exit::io_failure;
  } catch (const Error& e) {
    // ConditionError, IllConditioned, DegeneracyDetected, CommonFactor, DegenerateAtom.
    err << "condition: " << e.what() << "\n";
    return Exit::condition_failure;
  }
}

}  // namespace holocorr::cli
