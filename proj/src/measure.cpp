#include "holocorr/measure.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "holocorr/point_index.hpp"

namespace holocorr {

namespace {

// Fixed chunking keeps floating-point sums identical for any worker count.
constexpr std::size_t kChunk = 4096;

template <typename Fn>
void parallel_chunks(std::size_t n, unsigned workers, Fn&& fn) {
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  const unsigned w = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(chunks, 1))));
  auto run = [&](unsigned id) {
    for (std::size_t c = id; c < chunks; c += w) fn(c, c * kChunk, std::min(n, (c + 1) * kChunk));
  };
  if (w == 1) {
    run(0);
    return;
  }
  std::vector<std::jthread> pool;
  for (unsigned id = 0; id < w; ++id) pool.emplace_back(run, id);
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s, std::size_t line) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw IoError("atom file line " + std::to_string(line) + ": bad number '" + s + "'");
  }
  return v;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::mt19937_64 walk_rng(std::uint64_t seed, std::uint64_t index) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(index)));
}

// Uniform integer in [0, n) by rejection; portable across standard libraries.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  for (;;) {
    const std::uint64_t v = rng();
    if (v < limit) return v % n;
  }
}

AtomicMeasure merged(const std::vector<Atom>& atoms, double radius, Provenance provenance) {
  AtomicMeasure out;
  out.provenance = provenance;
  PointIndex index(radius);
  for (const auto& a : atoms) {
    if (auto hit = index.find_within(a.point, radius)) {
      out.atoms[*hit].weight += a.weight;
    } else {
      index.insert(a.point);
      out.atoms.push_back(a);
    }
  }
  return out;
}

}  // namespace

std::string to_string(MeasureMethod m) {
  switch (m) {
    case MeasureMethod::tree:
      return "tree";
    case MeasureMethod::chaos:
      return "chaos";
    case MeasureMethod::file:
      return "file";
  }
  return "file";
}

double AtomicMeasure::total_mass() const {
  double s = 0.0;
  for (const auto& a : atoms) s += a.weight;
  return s;
}

AtomicMeasure AtomicMeasure::dirac(const SpherePointd& a) {
  AtomicMeasure mu;
  mu.atoms.push_back({a, 1.0});
  mu.provenance.seed = a;
  return mu;
}

Complex evaluate(const TestFunction& phi, const SpherePointd& p) {
  return std::visit(
      [&](const auto& f) -> Complex {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Bump>) {
          const double d = chordal_distance(p, f.center);
          if (d >= f.radius) return 0.0;
          const double t = 1.0 - (d / f.radius) * (d / f.radius);
          return t * t * t;
        } else if constexpr (std::is_same_v<T, Moment>) {
          const double d = std::abs(p.h0());  // chordal distance to 0
          const double width = (1.0 - f.cutoff) / 2.0;
          double chi = 1.0;
          if (d > f.cutoff) {
            if (d >= f.cutoff + width) return 0.0;
            const double s = (d - f.cutoff) / width;
            chi = (1.0 - s * s) * (1.0 - s * s) * (1.0 - s * s);
          }
          return chi * std::pow(p.h0() / p.h1(), f.k);
        } else {
          return f.value;
        }
      },
      phi);
}

std::string describe(const TestFunction& phi) {
  return std::visit(
      [](const auto& f) -> std::string {
        using T = std::decay_t<decltype(f)>;
        std::ostringstream os;
        if constexpr (std::is_same_v<T, Bump>) {
          const auto e = f.center.embed();
          os << "bump(" << format_double(e.x()) << "," << format_double(e.y()) << "," << format_double(e.z())
             << ";r=" << format_double(f.radius) << ")";
        } else if constexpr (std::is_same_v<T, Moment>) {
          os << "moment(k=" << f.k << ";cutoff=" << format_double(f.cutoff) << ")";
        } else {
          os << "constant(" << format_double(f.value) << ")";
        }
        return os.str();
      },
      phi);
}

std::vector<SpherePointd> fibonacci_points(int n) {
  std::vector<SpherePointd> out;
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / n;
    const double r = std::sqrt(1.0 - z * z);
    const double theta = golden * i;
    out.push_back(SpherePointd::from_embedding(Eigen::Vector3d(r * std::cos(theta), r * std::sin(theta), z)));
  }
  return out;
}

std::vector<TestFunction> standard_family() {
  std::vector<TestFunction> out;
  for (const auto& c : fibonacci_points(64)) out.push_back(Bump{c, 0.35});
  for (int k = 1; k <= 4; ++k) out.push_back(Moment{k, 0.9});
  return out;
}

Complex pair(const AtomicMeasure& mu, const TestFunction& phi) {
  Complex s(0);
  for (const auto& a : mu.atoms) s += a.weight * evaluate(phi, a.point);
  return s;
}

Complex transfer(const Correspondence& f, const TestFunction& phi, const SpherePointd& x, const RootOptions& roots) {
  Complex s(0);
  for (const auto& fp : backward_image(f, x, roots)) s += static_cast<double>(fp.multiplicity) * evaluate(phi, fp.point);
  return s;
}

void check_atoms_generic(const Correspondence& f, const AtomicMeasure& mu, double tol) {
  const auto bad = degenerate_points(f);
  for (const auto& d : bad) {
    if (d.side != Side::backward) continue;
    for (const auto& a : mu.atoms) {
      if (chordal_distance(a.point, d.point) <= tol) {
        throw DegenerateAtom("atom lies on a degenerate fiber: " + d.description);
      }
    }
  }
}

AtomicMeasure pullback(const Correspondence& f, const AtomicMeasure& nu, const RootOptions& roots) {
  check_atoms_generic(f, nu);
  std::vector<Atom> raw;
  for (const auto& a : nu.atoms) {
    for (const auto& fp : backward_image(f, a.point, roots)) raw.push_back({fp.point, a.weight * fp.multiplicity});
  }
  Provenance prov = nu.provenance;
  prov.depth += 1;
  return merged(raw, prov.dedup_radius, prov);
}

AtomicMeasure pullback_normalized(const Correspondence& f, const AtomicMeasure& nu, const RootOptions& roots) {
  AtomicMeasure out = pullback(f, nu, roots);
  for (auto& a : out.atoms) a.weight /= f.topological_degree();
  return out;
}

AtomicMeasure boyd_tree(const Correspondence& f, const SpherePointd& a, int n, const Caps& caps,
                        const RootOptions& roots, unsigned workers) {
  if (n < 0) throw PreconditionError("tree depth must be nonnegative");
  FiberIteration::Options opts;
  opts.caps = caps;
  opts.roots = roots;
  opts.weight_scale = 1.0 / f.topological_degree();
  opts.keep_history = false;
  opts.workers = workers;
  FiberIteration it(f, a, Side::backward, opts);
  for (int k = 0; k < n; ++k) it.advance();
  AtomicMeasure mu;
  for (const auto& t : it.current()) mu.atoms.push_back({t.point, t.weight});
  mu.provenance.method = MeasureMethod::tree;
  mu.provenance.seed = a;
  mu.provenance.depth = n;
  mu.provenance.pruned_mass = it.pruned_weight();
  mu.provenance.dedup_radius = caps.dedup_radius;
  mu.provenance.exact = it.pruned_weight() < 1e-6;
  return mu;
}

namespace {

// Backward step through a forward graph of degree <= 2: roots of
// w1 P - w0 Q in homogeneous form, [q : c2] and [c0 : q], which stays valid
// when c2 or c0 vanishes. Returns false when the closed form degenerates.
bool quadratic_preimage(const RationalMap& map, const SpherePointd& w, int slot, SpherePointd& out) {
  const auto& P = map.numerator();
  const auto& Q = map.denominator();
  const int d = map.degree();
  Complex c[3];
  for (int j = 0; j <= d; ++j) c[j] = w.h1() * P[j] - w.h0() * Q[j];
  if (d == 1) {
    if (c[0] == Complex(0) && c[1] == Complex(0)) return false;
    out = SpherePointd::homogeneous(-c[0], c[1]);
    return true;
  }
  const Complex disc = std::sqrt(c[1] * c[1] - 4.0 * c[2] * c[0]);
  const Complex q = (std::real(std::conj(c[1]) * disc) >= 0.0) ? -0.5 * (c[1] + disc) : -0.5 * (c[1] - disc);
  if (q == Complex(0)) return false;
  out = (slot == 0) ? SpherePointd::homogeneous(q, c[2]) : SpherePointd::homogeneous(c[0], q);
  return true;
}

}  // namespace

SpherePointd chaos_walk(const Correspondence& f, const SpherePointd& a, int steps, std::uint64_t rng_seed,
                        std::uint64_t index, const RootOptions& roots) {
  auto rng = walk_rng(rng_seed, index);
  const auto dt = static_cast<std::uint64_t>(f.topological_degree());
  std::vector<int> weights;
  // Components whose backward fiber has a closed form.
  std::vector<const GraphComponent*> quick;
  for (std::size_t i = 0; i < f.component_count(); ++i) {
    weights.push_back(f.component_weight(i, Side::backward));
    const GraphComponent* c = nullptr;
    if (f.is_graph_chain()) {
      const auto& g = f.graph_components()[i];
      if (g.direction == Direction::forward && g.map.degree() <= 2) c = &g;
    }
    quick.push_back(c);
  }
  SpherePointd p = a;
  for (int s = 0; s < steps; ++s) {
    auto slot = static_cast<int>(uniform_below(rng, dt));
    std::size_t i = 0;
    while (slot >= weights[i]) slot -= weights[i++];
    if (quick[i] && quadratic_preimage(quick[i]->map, p, slot / quick[i]->multiplicity, p)) continue;
    const Fiber fiber = f.component_fiber(i, p, Side::backward, roots);
    std::size_t k = 0;
    while (k + 1 < fiber.size() && slot >= fiber[k].multiplicity) slot -= fiber[k++].multiplicity;
    p = fiber[k].point;
  }
  return p;
}

AtomicMeasure chaos_sample(const Correspondence& f, const SpherePointd& a, const ChaosOptions& options) {
  if (options.count < 1) throw PreconditionError("chaos sample count must be positive");
  if (options.burn < 0) throw PreconditionError("burn must be nonnegative");
  std::vector<Atom> raw(options.count);
  const double w = 1.0 / static_cast<double>(options.count);
  parallel_chunks(options.count, options.workers, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      raw[i] = {chaos_walk(f, a, options.burn, options.rng_seed, i, options.roots), w};
    }
  });
  Provenance prov;
  prov.method = MeasureMethod::chaos;
  prov.seed = a;
  prov.samples = options.count;
  prov.burn = options.burn;
  prov.rng_seed = options.rng_seed;
  prov.dedup_radius = options.dedup_radius;
  prov.exact = false;
  return merged(raw, options.dedup_radius, prov);
}

InvarianceDefect invariance_defect(const Correspondence& f, const AtomicMeasure& mu,
                                   const std::vector<TestFunction>& phis, const RootOptions& roots,
                                   unsigned workers) {
  check_atoms_generic(f, mu);
  const std::size_t n = mu.atoms.size();
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  // Per chunk: sums of w T(phi)(x) and w phi(x).
  std::vector<std::vector<Complex>> lhs(chunks, std::vector<Complex>(phis.size())), rhs = lhs;
  parallel_chunks(n, workers, [&](std::size_t c, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const Atom& a = mu.atoms[i];
      const Fiber fiber = backward_image(f, a.point, roots);
      for (std::size_t j = 0; j < phis.size(); ++j) {
        Complex t(0);
        for (const auto& fp : fiber) t += static_cast<double>(fp.multiplicity) * evaluate(phis[j], fp.point);
        lhs[c][j] += a.weight * t;
        rhs[c][j] += a.weight * evaluate(phis[j], a.point);
      }
    }
  });
  InvarianceDefect out;
  const double dt = f.topological_degree();
  for (std::size_t j = 0; j < phis.size(); ++j) {
    Complex l(0), r(0);
    for (std::size_t c = 0; c < chunks; ++c) {
      l += lhs[c][j];
      r += rhs[c][j];
    }
    const double d = std::abs(l - dt * r) / dt;
    out.per_function.push_back(d);
    out.max = std::max(out.max, d);
  }
  return out;
}

double weakstar_distance(const AtomicMeasure& a, const AtomicMeasure& b, const std::vector<TestFunction>& phis) {
  double worst = 0.0;
  for (const auto& phi : phis) worst = std::max(worst, std::abs(pair(a, phi) - pair(b, phi)));
  return worst;
}

void write_atoms(std::ostream& out, const AtomicMeasure& mu) {
  const auto& p = mu.provenance;
  out << "# holocorr atoms v1\n";
  out << "# method=" << to_string(p.method) << " depth=" << p.depth << " samples=" << p.samples << " burn=" << p.burn
      << " rng_seed=" << p.rng_seed << " pruned_mass=" << format_double(p.pruned_mass)
      << " dedup_radius=" << format_double(p.dedup_radius) << " exact=" << (p.exact ? "true" : "false") << "\n";
  out << "# total_mass=" << format_double(mu.total_mass()) << "\n";
  out << "kind,re,im,weight\n";
  std::string line;
  for (const auto& a : mu.atoms) {
    if (a.point.is_infinity()) {
      line = "inf,0,0,";
    } else {
      const Complex z = *a.point.to_affine();
      line = "affine," + format_double(z.real()) + "," + format_double(z.imag()) + ",";
    }
    line += format_double(a.weight);
    line += '\n';
    out << line;
  }
}

AtomicMeasure read_atoms(std::istream& in) {
  AtomicMeasure mu;
  std::optional<double> declared;
  bool header = false;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto pos = line.find("total_mass=");
      if (pos != std::string::npos) declared = parse_double(line.substr(pos + 11), lineno);
      continue;
    }
    if (!header) {
      if (line != "kind,re,im,weight") throw IoError("atom file line " + std::to_string(lineno) + ": expected header kind,re,im,weight");
      header = true;
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 4) throw IoError("atom file line " + std::to_string(lineno) + ": expected 4 fields");
    const double re = parse_double(fields[1], lineno), im = parse_double(fields[2], lineno);
    const double w = parse_double(fields[3], lineno);
    if (!(w > 0.0) || !std::isfinite(w)) throw IoError("atom file line " + std::to_string(lineno) + ": weight must be positive");
    if (fields[0] == "affine") {
      mu.atoms.push_back({SpherePointd::affine({re, im}), w});
    } else if (fields[0] == "inf") {
      mu.atoms.push_back({SpherePointd::infinity(), w});
    } else {
      throw IoError("atom file line " + std::to_string(lineno) + ": unknown kind '" + fields[0] + "'");
    }
  }
  if (!header) throw IoError("atom file has no header");
  if (declared && std::abs(*declared - mu.total_mass()) > 1e-6) {
    throw IoError("atom weights sum to " + format_double(mu.total_mass()) + " but total_mass=" + format_double(*declared));
  }
  return mu;
}

}  // namespace holocorr
