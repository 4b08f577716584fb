#ifndef INCLUDE_GIBBSDP_CLI_HPP
#define INCLUDE_GIBBSDP_CLI_HPP

// Run configuration, output formatting and the command implementations
// behind tools/gibbsdp.

#include <cstdint>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <algorithm>
#include <array>
#include <cmath>
#include <type_traits>

#include "json.hpp"

#include "gibbsdp.hpp"
#include "parallel.hpp"

namespace gibbsdp::cli {

using json = nlohmann::json;

/// Raised for invalid configurations; the message names the offending field.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ModelSpec {
  std::string name{"free"};
  double lambda{1.0};
  double q{2.0};
  double beta{0.5};
  double theta1{0.0};
  double theta2{0.0};
  std::optional<double> h_min{};
};

struct WindowSpec {
  std::vector<double> lo{0.0, 0.0};
  std::vector<double> hi{1.0, 1.0};
  double r_max{0.1};
  int frac_bits{32};
};

struct LawSpec {
  std::string kind{"delta"};
  double r{0.1};
  double r0{0.0};
  double r1{0.1};
  double rate{1.0};
  double shape{3.0};
  double scale{0.05};
  std::optional<double> truncate_at{};
  std::vector<double> knots{};
  std::vector<double> cdf{};
};

struct GridSpec {
  double radius{0.1};
  double spacing{0.1};
};

struct BoundarySpec {
  std::vector<std::vector<double>> points{};
  std::optional<GridSpec> grid{};
};

struct PercolationSpec {
  std::vector<double> alphas{0.0, 0.4, 0.8};
  std::vector<double> distances{2.0, 4.0, 6.0, 8.0};
  bool threshold{false};
  double small_side{6.0};
  double large_side{12.0};
  double alpha_lo{0.8};
  double alpha_hi{2.2};
  std::size_t threshold_reps{200};
  std::size_t batches{4};
};

struct DecaySpec {
  std::vector<double> cell_lo{0.0, 0.0};
  std::vector<double> cell_hi{0.2, 0.2};
  std::vector<double> separations{0.2, 0.4, 0.6, 0.8};
};

struct VerifySpec {
  std::string suite{"default"};
  bool plant_violation{false};
};

struct RunConfig {
  int dimension{2};
  ModelSpec model{};
  WindowSpec window{};
  LawSpec radius_law{};
  std::optional<double> alpha{};
  std::size_t replicates{10};
  std::uint64_t seed{1};
  int threads{1};
  std::string sampler{"rejection"};
  std::string keep_rule{"exact"};
  std::size_t z_samples{20000};
  double bias_budget{0.05};
  int n_max{0};
  std::size_t quad_budget{100000};
  BoundarySpec gamma1{};
  BoundarySpec gamma2{};
  bool shared_streams{false};
  std::size_t depth_cap{10000};
  PercolationSpec percolation{};
  DecaySpec decay{};
  VerifySpec verify{};
};

// ---------------------------------------------------------------------------
// JSON <-> RunConfig.

namespace detail {

class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if(!j_.is_object()) {
      throw ConfigError("field '" + (path_.empty() ? std::string("<root>") : path_) + "': expected an object");
    }
  }

  template<typename T>
  void get(const char* key, T& out) {
    seen_.push_back(key);
    if(!j_.contains(key) || j_.at(key).is_null()) {
      return;
    }
    try {
      out = j_.at(key).get<T>();
    } catch(const json::exception& e) {
      throw ConfigError("field '" + name(key) + "': " + e.what());
    }
  }

  template<typename T>
  void get_optional(const char* key, std::optional<T>& out) {
    seen_.push_back(key);
    if(!j_.contains(key) || j_.at(key).is_null()) {
      return;
    }
    try {
      out = j_.at(key).get<T>();
    } catch(const json::exception& e) {
      throw ConfigError("field '" + name(key) + "': " + e.what());
    }
  }

  bool has(const char* key) const { return j_.contains(key) && !j_.at(key).is_null(); }
  const json& at(const char* key) {
    seen_.push_back(key);
    return j_.at(key);
  }
  std::string name(const char* key) const { return path_.empty() ? std::string(key) : path_ + "." + key; }

  void finish() const {
    for(auto it = j_.begin(); it != j_.end(); ++it) {
      if(std::find(seen_.begin(), seen_.end(), it.key()) == seen_.end()) {
        throw ConfigError("field '" + name(it.key().c_str()) + "': unknown field");
      }
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::vector<std::string> seen_;
};

inline void read_boundary(const json& j, const std::string& path, BoundarySpec& b) {
  if(j.is_array()) {
    try {
      b.points = j.get<std::vector<std::vector<double>>>();
    } catch(const json::exception& e) {
      throw ConfigError("field '" + path + "': " + e.what());
    }
    return;
  }
  Reader r(j, path);
  r.get("points", b.points);
  if(r.has("grid")) {
    Reader g(r.at("grid"), path + ".grid");
    GridSpec spec;
    g.get("radius", spec.radius);
    g.get("spacing", spec.spacing);
    g.finish();
    b.grid = spec;
  }
  r.finish();
}

inline json boundary_json(const BoundarySpec& b) {
  json j;
  j["points"] = b.points;
  if(b.grid) {
    j["grid"] = {{"radius", b.grid->radius}, {"spacing", b.grid->spacing}};
  }
  return j;
}

}  // namespace detail

inline RunConfig parse_config(const json& root) {
  RunConfig c;
  detail::Reader r(root, "");
  r.get("dimension", c.dimension);
  if(r.has("model")) {
    detail::Reader m(r.at("model"), "model");
    m.get("name", c.model.name);
    m.get("lambda", c.model.lambda);
    m.get("q", c.model.q);
    m.get("beta", c.model.beta);
    m.get("theta1", c.model.theta1);
    m.get("theta2", c.model.theta2);
    m.get_optional("h_min", c.model.h_min);
    m.finish();
  }
  if(r.has("window")) {
    detail::Reader w(r.at("window"), "window");
    w.get("lo", c.window.lo);
    w.get("hi", c.window.hi);
    w.get("r_max", c.window.r_max);
    w.get("frac_bits", c.window.frac_bits);
    w.finish();
  }
  if(r.has("radius_law")) {
    detail::Reader l(r.at("radius_law"), "radius_law");
    l.get("kind", c.radius_law.kind);
    l.get("r", c.radius_law.r);
    l.get("r0", c.radius_law.r0);
    l.get("r1", c.radius_law.r1);
    l.get("rate", c.radius_law.rate);
    l.get("shape", c.radius_law.shape);
    l.get("scale", c.radius_law.scale);
    l.get_optional("truncate_at", c.radius_law.truncate_at);
    l.get("knots", c.radius_law.knots);
    l.get("cdf", c.radius_law.cdf);
    l.finish();
  }
  if(r.has("alpha")) {
    const json& a = r.at("alpha");
    if(a.is_string() && a.get<std::string>() == "auto") {
      c.alpha.reset();
    } else if(a.is_number()) {
      c.alpha = a.get<double>();
    } else {
      throw ConfigError("field 'alpha': expected a number or \"auto\"");
    }
  } else {
    r.get_optional("alpha", c.alpha);
  }
  r.get("replicates", c.replicates);
  r.get("seed", c.seed);
  r.get("threads", c.threads);
  r.get("sampler", c.sampler);
  if(r.has("estimator")) {
    detail::Reader e(r.at("estimator"), "estimator");
    e.get("keep_rule", c.keep_rule);
    e.get("z_samples", c.z_samples);
    e.get("bias_budget", c.bias_budget);
    e.get("n_max", c.n_max);
    e.get("quad_budget", c.quad_budget);
    e.finish();
  }
  if(r.has("coupling")) {
    detail::Reader cp(r.at("coupling"), "coupling");
    if(cp.has("gamma1")) {
      detail::read_boundary(cp.at("gamma1"), "coupling.gamma1", c.gamma1);
    }
    if(cp.has("gamma2")) {
      detail::read_boundary(cp.at("gamma2"), "coupling.gamma2", c.gamma2);
    }
    cp.get("shared_streams", c.shared_streams);
    cp.get("depth_cap", c.depth_cap);
    cp.finish();
  }
  if(r.has("percolation")) {
    detail::Reader p(r.at("percolation"), "percolation");
    p.get("alphas", c.percolation.alphas);
    p.get("distances", c.percolation.distances);
    p.get("threshold", c.percolation.threshold);
    p.get("small_side", c.percolation.small_side);
    p.get("large_side", c.percolation.large_side);
    p.get("alpha_lo", c.percolation.alpha_lo);
    p.get("alpha_hi", c.percolation.alpha_hi);
    p.get("threshold_reps", c.percolation.threshold_reps);
    p.get("batches", c.percolation.batches);
    p.finish();
  }
  if(r.has("decay")) {
    detail::Reader d(r.at("decay"), "decay");
    d.get("cell_lo", c.decay.cell_lo);
    d.get("cell_hi", c.decay.cell_hi);
    d.get("separations", c.decay.separations);
    d.finish();
  }
  if(r.has("verify")) {
    detail::Reader v(r.at("verify"), "verify");
    v.get("suite", c.verify.suite);
    v.get("plant_violation", c.verify.plant_violation);
    v.finish();
  }
  r.finish();
  return c;
}

inline RunConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch(const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return parse_config(j);
}

inline json to_json(const RunConfig& c) {
  json j;
  j["dimension"] = c.dimension;
  j["model"] = {{"name", c.model.name},     {"lambda", c.model.lambda}, {"q", c.model.q},
                {"beta", c.model.beta},     {"theta1", c.model.theta1}, {"theta2", c.model.theta2},
                {"h_min", c.model.h_min ? json(*c.model.h_min) : json(nullptr)}};
  j["window"] = {{"lo", c.window.lo}, {"hi", c.window.hi}, {"r_max", c.window.r_max}, {"frac_bits", c.window.frac_bits}};
  j["radius_law"] = {{"kind", c.radius_law.kind},
                     {"r", c.radius_law.r},
                     {"r0", c.radius_law.r0},
                     {"r1", c.radius_law.r1},
                     {"rate", c.radius_law.rate},
                     {"shape", c.radius_law.shape},
                     {"scale", c.radius_law.scale},
                     {"truncate_at", c.radius_law.truncate_at ? json(*c.radius_law.truncate_at) : json(nullptr)},
                     {"knots", c.radius_law.knots},
                     {"cdf", c.radius_law.cdf}};
  j["alpha"] = c.alpha ? json(*c.alpha) : json("auto");
  j["replicates"] = c.replicates;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["sampler"] = c.sampler;
  j["estimator"] = {{"keep_rule", c.keep_rule},
                    {"z_samples", c.z_samples},
                    {"bias_budget", c.bias_budget},
                    {"n_max", c.n_max},
                    {"quad_budget", c.quad_budget}};
  j["coupling"] = {{"gamma1", detail::boundary_json(c.gamma1)},
                   {"gamma2", detail::boundary_json(c.gamma2)},
                   {"shared_streams", c.shared_streams},
                   {"depth_cap", c.depth_cap}};
  j["percolation"] = {{"alphas", c.percolation.alphas},
                      {"distances", c.percolation.distances},
                      {"threshold", c.percolation.threshold},
                      {"small_side", c.percolation.small_side},
                      {"large_side", c.percolation.large_side},
                      {"alpha_lo", c.percolation.alpha_lo},
                      {"alpha_hi", c.percolation.alpha_hi},
                      {"threshold_reps", c.percolation.threshold_reps},
                      {"batches", c.percolation.batches}};
  j["decay"] = {{"cell_lo", c.decay.cell_lo}, {"cell_hi", c.decay.cell_hi}, {"separations", c.decay.separations}};
  j["verify"] = {{"suite", c.verify.suite}, {"plant_violation", c.verify.plant_violation}};
  return j;
}

// ---------------------------------------------------------------------------
// Building library objects.

inline RadiusLaw build_law(const LawSpec& s, double r_max) {
  RadiusLaw law = RadiusLaw::delta(0.0);
  try {
    if(s.kind == "delta") {
      law = RadiusLaw::delta(s.r);
    } else if(s.kind == "uniform") {
      law = RadiusLaw::uniform(s.r0, s.r1);
    } else if(s.kind == "tabulated") {
      law = RadiusLaw::tabulated(s.knots, s.cdf);
    } else if(s.kind == "exponential") {
      law = RadiusLaw::exponential(s.rate);
    } else if(s.kind == "pareto") {
      law = RadiusLaw::pareto(s.shape, s.scale);
    } else {
      throw ConfigError("field 'radius_law.kind': unknown kind '" + s.kind + "'");
    }
    if(!law.is_bounded()) {
      law = law.truncated(s.truncate_at.value_or(r_max));
    }
  } catch(const std::invalid_argument& e) {
    throw ConfigError(std::string("field 'radius_law': ") + e.what());
  }
  if(law.support_max() > r_max * (1 + 1e-12)) {
    throw ConfigError("field 'radius_law': support exceeds window.r_max");
  }
  return law;
}

template<int D>
AnyModel<D> build_model(const ModelSpec& s, double r_max) {
  if(s.name == "free") {
    return FreeModel<D>{};
  }
  if(s.name == "hard_sphere") {
    return HardSphere<D>{};
  }
  if(s.name == "strauss") {
    if(!(s.beta >= 0)) {
      throw ConfigError("field 'model.beta': must be >= 0");
    }
    return Strauss<D>(s.beta);
  }
  if(s.name == "crcm") {
    if(!(s.q >= 1)) {
      throw ConfigError("field 'model.q': must be >= 1 for a finite domination level");
    }
    return Crcm<D>(s.q);
  }
  if(s.name == "area_interaction") {
    if(D != 2) {
      throw ConfigError("field 'model.name': area_interaction requires dimension 2");
    }
    if(s.theta2 != 0 && !s.h_min) {
      throw ConfigError("field 'model.h_min': required when theta2 != 0");
    }
    return AreaInteraction<D>{s.theta1, s.theta2, r_max, s.h_min};
  }
  throw ConfigError("field 'model.name': unknown model '" + s.name + "'");
}

template<int D>
Window<D> build_window(const WindowSpec& s) {
  if(s.lo.size() != D || s.hi.size() != D) {
    throw ConfigError("field 'window': lo and hi must have " + std::to_string(D) + " entries");
  }
  std::array<double, D> lo{}, hi{};
  for(int i = 0; i < D; ++i) {
    lo[i] = s.lo[i];
    hi[i] = s.hi[i];
  }
  try {
    return Window<D>(lo, hi, s.r_max, s.frac_bits);
  } catch(const std::exception& e) {
    throw ConfigError(std::string("field 'window': ") + e.what());
  }
}

template<int D>
Configuration<D> build_boundary(const BoundarySpec& s, const Window<D>& window, const std::string& field) {
  Configuration<D> out;
  for(const auto& p: s.points) {
    if(p.size() != D + 1) {
      throw ConfigError("field '" + field + "': each point needs " + std::to_string(D) + " coordinates and a radius");
    }
    std::array<double, D> x{};
    for(int i = 0; i < D; ++i) {
      x[i] = p[static_cast<std::size_t>(i)];
    }
    const auto pt = Point<D>::from_double(x, p[D]);
    if(window.contains_center(pt.center)) {
      throw ConfigError("field '" + field + "': boundary point inside the window");
    }
    out.try_insert(pt);
  }
  if(s.grid) {
    // Grid boundaries surround a window centred at the origin.
    double half = 0.0;
    for(int i = 0; i < D; ++i) {
      half = std::max({half, std::abs(window.lo(i)), std::abs(window.hi(i))});
    }
    for(const auto& p: dense_grid_boundary<D>(half, window.r_max(), s.grid->radius, s.grid->spacing)) {
      if(!window.contains_center(p.center)) {
        out.try_insert(p);
      }
    }
  }
  return out;
}

/// Everything a command needs, resolved and validated.
template<int D>
struct Resolved {
  RunConfig config;
  Window<D> window;
  RadiusLaw law;
  AnyModel<D> model;
  double lambda;
  double alpha;
  Configuration<D> gamma1;
  Configuration<D> gamma2;
};

template<int D>
Resolved<D> resolve(const RunConfig& c) {
  if(c.threads < 1) {
    throw ConfigError("field 'threads': must be >= 1");
  }
  if(!(c.model.lambda >= 0)) {
    throw ConfigError("field 'model.lambda': must be >= 0");
  }
  const Window<D> window = build_window<D>(c.window);
  RadiusLaw law = build_law(c.radius_law, window.r_max());
  AnyModel<D> model = build_model<D>(c.model, window.r_max());
  double level = 0.0;
  try {
    level = dom_level(model, c.model.lambda);
  } catch(const std::exception& e) {
    throw ConfigError(std::string("field 'model': ") + e.what());
  }
  const double alpha = c.alpha.value_or(level);
  if(alpha < level * (1 - 1e-12)) {
    throw ConfigError("field 'alpha': below the domination level " + std::to_string(level));
  }
  if(c.sampler != "rejection" && c.sampler != "thin") {
    throw ConfigError("field 'sampler': expected \"rejection\" or \"thin\"");
  }
  if(c.keep_rule != "exact" && c.keep_rule != "estimated") {
    throw ConfigError("field 'estimator.keep_rule': expected \"exact\" or \"estimated\"");
  }
  return Resolved<D>{c,
                     window,
                     law,
                     model,
                     c.model.lambda,
                     alpha,
                     build_boundary<D>(c.gamma1, window, "coupling.gamma1"),
                     build_boundary<D>(c.gamma2, window, "coupling.gamma2")};
}

// ---------------------------------------------------------------------------
// Output.

enum class Format { jsonl, csv };

inline std::string num(double v) {
  if(std::isinf(v)) {
    return v > 0 ? "\"inf\"" : "\"-inf\"";
  }
  if(std::isnan(v)) {
    return "\"nan\"";
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template<int D>
std::string points_json(const Configuration<D>& omega) {
  std::string s = "[";
  bool first = true;
  for(const auto& p: omega) {
    s += first ? "[" : ",[";
    first = false;
    for(int i = 0; i < D; ++i) {
      s += num(p.x(i));
      s += ',';
    }
    s += num(p.r());
    s += ']';
  }
  return s + "]";
}

template<int D>
std::string points_csv(std::size_t replicate, const Configuration<D>& omega, const std::string& extra = "") {
  std::string s;
  std::size_t index = 0;
  for(const auto& p: omega) {
    s += std::to_string(replicate) + "," + std::to_string(index++);
    if(!extra.empty()) {
      s += "," + extra;
    }
    for(int i = 0; i < D; ++i) {
      s += "," + csv_num(p.x(i));
    }
    s += "," + csv_num(p.r()) + "\n";
  }
  return s;
}

template<int D>
std::string coordinate_header() {
  std::string s;
  for(int i = 0; i < D; ++i) {
    s += ",x" + std::to_string(i);
  }
  return s + ",r";
}

/// Runs f(r) for every replicate (possibly in parallel) and writes the
/// returned chunks in replicate order.
inline void emit_replicates(std::ostream& out, std::size_t reps, int threads,
                            const std::function<std::string(std::size_t)>& f) {
  std::vector<std::string> chunks(reps);
  parallel_for(reps, threads, [&](std::size_t r) { chunks[r] = f(r); });
  for(const auto& c: chunks) {
    out << c;
  }
}

template<int D>
ThinningOptions thinning_options(const Resolved<D>& R) {
  ThinningOptions o;
  o.rule = R.config.keep_rule == "exact" ? KeepRule::exact_factory : KeepRule::estimated;
  o.z_samples = R.config.z_samples;
  o.bias_budget = R.config.bias_budget;
  return o;
}

template<int D>
std::string meta_json(const Resolved<D>& R, const std::string& sampler) {
  return "{\"sampler\":\"" + sampler + "\",\"model\":\"" + R.model.name() + "\",\"lambda\":" + num(R.lambda) +
         ",\"alpha\":" + num(R.alpha) + ",\"dimension\":" + std::to_string(D) +
         ",\"radius_law\":\"" + R.law.describe() + "\",\"tail_mass\":" + num(R.law.tail_mass()) + "}";
}

// ---------------------------------------------------------------------------
// Commands. Each returns the process exit code.

template<int D>
int cmd_sample(const Resolved<D>& R, std::ostream& out, Format format) {
  const auto& c = R.config;
  const OrderInterval<D> all{};
  if(format == Format::csv) {
    out << "replicate,index" << coordinate_header<D>() << "\n";
  }
  const auto kernel = ThinningKernel<AnyModel<D>, D>::make(R.model, R.lambda, R.law, R.window, all, R.gamma1, R.alpha);
  const Context<D> ctx(R.gamma1, R.window);
  const auto options = thinning_options(R);
  emit_replicates(out, c.replicates, c.threads, [&](std::size_t r) {
    Rng rng = make_stream(c.seed, r, 0, StreamRole::poisson);
    Configuration<D> omega;
    if(c.sampler == "rejection") {
      omega = gibbs_rejection_sample(R.model, R.lambda, all, ctx, R.law, R.window, R.alpha, rng);
    } else {
      omega = thin_sample(kernel, rng, options).kept;
    }
    if(format == Format::csv) {
      return points_csv(r, omega);
    }
    std::string meta = meta_json(R, c.sampler);
    meta.pop_back();
    meta += ",\"count\":" + std::to_string(omega.size()) + "}";
    return "{\"replicate\":" + std::to_string(r) + ",\"points\":" + points_json(omega) + ",\"meta\":" + meta + "}\n";
  });
  return 0;
}

template<int D>
int cmd_thin(const Resolved<D>& R, std::ostream& out, Format format) {
  const auto& c = R.config;
  const auto kernel = ThinningKernel<AnyModel<D>, D>::make(R.model, R.lambda, R.law, R.window, {}, R.gamma1, R.alpha);
  const auto options = thinning_options(R);
  if(format == Format::csv) {
    out << "replicate,index,kept" << coordinate_header<D>() << "\n";
  }
  std::vector<char> flagged(c.replicates, 0);
  emit_replicates(out, c.replicates, c.threads, [&](std::size_t r) {
    Rng rng = make_stream(c.seed, r, 0, StreamRole::poisson);
    const auto res = thin_sample(kernel, rng, options);
    flagged[r] = res.flagged ? 1 : 0;
    if(format == Format::csv) {
      std::string s;
      std::size_t index = 0;
      for(const auto& p: res.poisson) {
        s += std::to_string(r) + "," + std::to_string(index++) + "," + (res.kept.contains(p) ? "1" : "0");
        for(int i = 0; i < D; ++i) {
          s += "," + csv_num(p.x(i));
        }
        s += "," + csv_num(p.r()) + "\n";
      }
      return s;
    }
    std::string meta = meta_json(R, "thin");
    meta.pop_back();
    meta += ",\"keep_rule\":\"" + c.keep_rule + "\",\"bias\":" + num(res.bias) +
            ",\"flagged\":" + (res.flagged ? "true" : "false") + "}";
    return "{\"replicate\":" + std::to_string(r) + ",\"points\":" + points_json(res.kept) +
           ",\"poisson\":" + points_json(res.poisson) + ",\"meta\":" + meta + "}\n";
  });
  const auto n_flagged = std::count(flagged.begin(), flagged.end(), char{1});
  if(format == Format::csv) {
    out << "# flagged=" << n_flagged << "\n";
  } else {
    out << "{\"summary\":{\"records\":" << c.replicates << ",\"flagged\":" << n_flagged << "}}\n";
  }
  return 0;
}

template<int D>
int cmd_couple(const Resolved<D>& R, std::ostream& out, Format format) {
  const auto& c = R.config;
  CouplingOptions options;
  options.depth_cap = c.depth_cap;
  options.shared_streams = c.shared_streams;
  options.thinning = thinning_options(R);
  struct Row {
    std::size_t depth{0};
    bool ok{true};
    bool aborted{false};
  };
  std::vector<Row> rows(c.replicates);
  if(format == Format::csv) {
    out << "replicate,layers,disagreements,n_xi1,n_xi2,n_xi3,subset_ok,connectivity_ok\n";
  }
  emit_replicates(out, c.replicates, c.threads, [&](std::size_t r) -> std::string {
    CouplingSample<D> s;
    try {
      s = disagreement_sample(R.model, R.lambda, R.alpha, R.law, R.window, R.gamma1, R.gamma2, c.seed, r, options);
    } catch(const DepthCapExceeded& e) {
      rows[r].aborted = true;
      rows[r].ok = false;
      if(format == Format::csv) {
        return std::to_string(r) + ",-1,-1,-1,-1,-1,0,0\n";
      }
      return "{\"replicate\":" + std::to_string(r) + ",\"aborted\":" + json(std::string(e.what())).dump() + "}\n";
    }
    const auto report = verify_disagreement(s);
    rows[r] = {s.depth(), report.ok(), false};
    if(format == Format::csv) {
      return std::to_string(r) + "," + std::to_string(s.depth()) + "," + std::to_string(s.disagreements()) + "," +
             std::to_string(s.xi1.size()) + "," + std::to_string(s.xi2.size()) + "," + std::to_string(s.xi3.size()) +
             "," + (report.subset_ok ? "1" : "0") + "," + (report.connectivity_ok ? "1" : "0") + "\n";
    }
    std::string violations = json(report.violations).dump();
    return "{\"replicate\":" + std::to_string(r) + ",\"xi1\":" + points_json(s.xi1) + ",\"xi2\":" +
           points_json(s.xi2) + ",\"xi3\":" + points_json(s.xi3) + ",\"layers\":" + std::to_string(s.depth()) +
           ",\"disagreements\":" + std::to_string(s.disagreements()) + ",\"verified\":{\"subset\":" +
           (report.subset_ok ? "true" : "false") + ",\"connectivity\":" + (report.connectivity_ok ? "true" : "false") +
           "},\"violations\":" + violations + "}\n";
  });
  std::map<std::size_t, std::size_t> histogram;
  std::size_t violations = 0;
  std::size_t aborted = 0;
  for(const auto& row: rows) {
    if(row.aborted) {
      ++aborted;
    } else {
      ++histogram[row.depth];
    }
    violations += row.ok ? 0 : 1;
  }
  if(format == Format::csv) {
    out << "# violations=" << violations << "\n# aborted=" << aborted << "\n# depth_histogram=";
    bool first = true;
    for(const auto& [d, n]: histogram) {
      out << (first ? "" : ";") << d << ":" << n;
      first = false;
    }
    out << "\n";
  } else {
    out << "{\"summary\":{\"records\":" << c.replicates << ",\"violations\":" << violations
        << ",\"aborted\":" << aborted << ",\"depth_histogram\":{";
    bool first = true;
    for(const auto& [d, n]: histogram) {
      out << (first ? "" : ",") << "\"" << d << "\":" << n;
      first = false;
    }
    out << "}}}\n";
  }
  return violations == 0 ? 0 : 1;
}

template<int D>
int cmd_percolate(const Resolved<D>& R, std::ostream& out, Format format) {
  const auto& c = R.config;
  const auto& p = c.percolation;
  const auto rows = connection_sweep<D>(p.alphas, p.distances, R.law, c.replicates, c.seed, c.window.frac_bits, c.threads);
  if(format == Format::csv) {
    out << "alpha,distance,p_connect,se,reps,seed\n";
  }
  for(const auto& row: rows) {
    if(format == Format::csv) {
      out << csv_num(row.alpha) << "," << csv_num(row.distance) << "," << csv_num(row.p) << "," << csv_num(row.se)
          << "," << row.reps << "," << c.seed << "\n";
    } else {
      out << "{\"alpha\":" << num(row.alpha) << ",\"distance\":" << num(row.distance) << ",\"p_connect\":"
          << num(row.p) << ",\"se\":" << num(row.se) << ",\"reps\":" << row.reps << ",\"seed\":" << c.seed << "}\n";
    }
  }
  for(const double a: p.alphas) {
    std::vector<DecayRow> table;
    for(const auto& row: rows) {
      if(row.alpha == a) {
        table.push_back({row.distance, row.p, row.se});
      }
    }
    const bool fittable = table.size() >= 4 && std::all_of(table.begin(), table.end(), [](const DecayRow& t) {
      return t.probability > 0 && t.probability < 1;
    });
    if(!fittable) {
      continue;
    }
    const auto fit = fit_decay(table);
    if(format == Format::csv) {
      out << "# fit alpha=" << csv_num(a) << " kappa=" << csv_num(fit.kappa) << " K=" << csv_num(fit.K)
          << " r_squared=" << csv_num(fit.r_squared) << "\n";
    } else {
      out << "{\"summary\":{\"fit\":{\"alpha\":" << num(a) << ",\"kappa\":" << num(fit.kappa) << ",\"K\":"
          << num(fit.K) << ",\"r_squared\":" << num(fit.r_squared) << "}}}\n";
    }
  }
  if(p.threshold) {
    if constexpr(D >= 2) {
      const auto th = estimate_threshold<D>(R.law, p.small_side, p.large_side, p.alpha_lo, p.alpha_hi,
                                            p.threshold_reps, p.batches, c.seed);
      if(format == Format::csv) {
        out << "# threshold alpha_c=" << csv_num(th.alpha_c) << " ci_low=" << csv_num(th.ci_low)
            << " ci_high=" << csv_num(th.ci_high) << "\n";
      } else {
        out << "{\"summary\":{\"threshold\":{\"alpha_c\":" << num(th.alpha_c) << ",\"ci_low\":" << num(th.ci_low)
            << ",\"ci_high\":" << num(th.ci_high) << "}}}\n";
      }
    } else {
      throw ConfigError("field 'percolation.threshold': no finite threshold in dimension one");
    }
  }
  return 0;
}

template<int D>
int cmd_decay(const Resolved<D>& R, std::ostream& out, Format format) {
  const auto& c = R.config;
  if(c.decay.cell_lo.size() != D || c.decay.cell_hi.size() != D) {
    throw ConfigError("field 'decay': cell_lo and cell_hi need " + std::to_string(D) + " entries");
  }
  std::array<double, D> lo{}, hi{};
  for(int i = 0; i < D; ++i) {
    lo[i] = c.decay.cell_lo[i];
    hi[i] = c.decay.cell_hi[i];
  }
  const auto cell = BoxProbe<D>::from_double(lo, hi);
  const Event<D> nonempty = [](const Configuration<D>& w) { return !w.empty(); };
  const auto report = correlation_decay(R.model, R.lambda, R.law, R.window, cell, c.decay.separations, nonempty,
                                        nonempty, c.replicates, c.seed, c.threads);
  if(format == Format::csv) {
    out << "separation,event_cov,event_se,count_cov_density,count_se\n";
  }
  for(const auto& row: report.rows) {
    if(format == Format::csv) {
      out << csv_num(row.separation) << "," << csv_num(row.event_cov) << "," << csv_num(row.event_se) << ","
          << csv_num(row.count_cov_density) << "," << csv_num(row.count_se) << "\n";
    } else {
      out << "{\"separation\":" << num(row.separation) << ",\"event_cov\":" << num(row.event_cov)
          << ",\"event_se\":" << num(row.event_se) << ",\"count_cov_density\":" << num(row.count_cov_density)
          << ",\"count_se\":" << num(row.count_se) << "}\n";
    }
  }
  if(report.fitted) {
    if(format == Format::csv) {
      out << "# fit kappa=" << csv_num(report.fit.kappa) << " K=" << csv_num(report.fit.K)
          << " r_squared=" << csv_num(report.fit.r_squared) << "\n";
    } else {
      out << "{\"summary\":{\"fit\":{\"kappa\":" << num(report.fit.kappa) << ",\"K\":" << num(report.fit.K)
          << ",\"r_squared\":" << num(report.fit.r_squared) << "}}}\n";
    }
  }
  return 0;
}

// ---------------------------------------------------------------------------
// verify: invariant suites on the configured model.

struct CheckResult {
  std::string name;
  bool passed;
  double statistic;
  double p_value;
  std::string detail;
};

template<int D>
std::vector<CheckResult> run_checks(const Resolved<D>& R) {
  const auto& c = R.config;
  const std::size_t reps = c.replicates;
  const OrderInterval<D> all{};
  std::vector<CheckResult> results;
  const double level = 0.01;

  {
    // Order round trip on random grid points.
    Rng rng = make_stream(c.seed, 0, 0, StreamRole::aux);
    bool ok = true;
    for(int i = 0; i < 2000 && ok; ++i) {
      const auto p = sample_uniform_point(R.window, R.law, rng);
      ok = decode(encode(p, R.window), R.window) == p;
    }
    results.push_back({"order_roundtrip", ok, 0.0, 1.0, "2000 points"});
  }
  {
    // Poisson counts against Poisson(alpha |Lambda|).
    std::vector<long> counts(reps);
    parallel_for(reps, c.threads, [&](std::size_t r) {
      Rng rng = make_stream(c.seed, r, 1, StreamRole::poisson);
      counts[r] = static_cast<long>(sample_poisson(R.window, R.alpha, R.law, rng).size());
    });
    const double mean = R.alpha * R.window.volume();
    const auto t = chi_square_gof(counts, [&](long k) { return poisson_pmf(static_cast<int>(k), mean); });
    results.push_back({"poisson_counts", t.p_value > level, t.statistic, t.p_value, "dof=" + std::to_string(t.dof)});
  }
  {
    // Thinning marginal against the rejection sampler.
    const auto kernel = ThinningKernel<AnyModel<D>, D>::make(R.model, R.lambda, R.law, R.window, all, R.gamma1, R.alpha);
    const Context<D> ctx(R.gamma1, R.window);
    const auto options = thinning_options(R);
    std::vector<long> a(reps), b(reps);
    parallel_for(reps, c.threads, [&](std::size_t r) {
      Rng r1 = make_stream(c.seed, r, 2, StreamRole::thin1);
      Rng r2 = make_stream(c.seed, r, 2, StreamRole::oracle);
      a[r] = static_cast<long>(thin_sample(kernel, r1, options).kept.size());
      b[r] = static_cast<long>(gibbs_rejection_sample(R.model, R.lambda, all, ctx, R.law, R.window, R.alpha, r2).size());
    });
    const auto t = chi_square_two_sample(a, b);
    results.push_back(
        {"thinning_vs_rejection", t.p_value > level, t.statistic, t.p_value, "dof=" + std::to_string(t.dof)});
  }
  {
    // Coupling: structure per sample, xi3 counts, depth tail.
    CouplingOptions options;
    options.depth_cap = c.depth_cap;
    options.shared_streams = c.shared_streams;
    options.thinning = thinning_options(R);
    std::vector<CouplingSample<D>> samples(reps);
    parallel_for(reps, c.threads, [&](std::size_t r) {
      samples[r] = disagreement_sample(R.model, R.lambda, R.alpha, R.law, R.window, R.gamma1, R.gamma2,
                                       derive_seed(c.seed, 3), r, options);
    });
    if(c.verify.plant_violation) {
      // A disagreement point far from the boundary and from xi3.
      CouplingSample<D> planted;
      planted.gamma1 = R.gamma1;
      planted.gamma2 = R.gamma2;
      std::array<double, D> mid{};
      for(int i = 0; i < D; ++i) {
        mid[i] = 0.5 * (R.window.lo(i) + R.window.hi(i));
      }
      const auto x = Point<D>::from_double(mid, 0.0);
      planted.xi1.insert(x);
      samples.push_back(planted);
    }
    std::size_t violations = 0;
    std::vector<long> xi3(reps);
    std::size_t max_thin2 = 0;
    std::vector<std::size_t> thin2_layers;
    for(std::size_t r = 0; r < samples.size(); ++r) {
      violations += verify_disagreement(samples[r]).ok() ? 0 : 1;
      if(r < reps) {
        xi3[r] = static_cast<long>(samples[r].xi3.size());
        const std::size_t k = samples[r].depth() - 1;
        thin2_layers.push_back(k);
        max_thin2 = std::max(max_thin2, k);
      }
    }
    results.push_back({"coupling_structure", violations == 0, static_cast<double>(violations), violations == 0 ? 1.0 : 0.0,
                       std::to_string(samples.size()) + " samples"});
    const double mean = R.alpha * R.window.volume();
    const auto t = chi_square_gof(xi3, [&](long k) { return poisson_pmf(static_cast<int>(k), mean); });
    results.push_back({"coupling_xi3_poisson", t.p_value > level, t.statistic, t.p_value, "dof=" + std::to_string(t.dof)});
    // P(#thin2 layers >= t) <= rho^{t-1}: one-sided binomial test per t.
    const double mass = R.window.volume();
    const double rho = 1.0 - std::exp(-R.alpha * mass);
    double worst = 1.0;
    for(std::size_t t2 = 2; t2 <= max_thin2; ++t2) {
      const auto hits = static_cast<std::size_t>(
          std::count_if(thin2_layers.begin(), thin2_layers.end(), [&](std::size_t k) { return k >= t2; }));
      worst = std::min(worst, binomial_upper_tail(hits, reps, std::pow(rho, static_cast<double>(t2 - 1))));
    }
    results.push_back({"coupling_depth_tail", worst > level, rho, worst, "max thin2 layers " + std::to_string(max_thin2)});
  }
  if(c.verify.suite != "smoke") {
    // Partition function: quadrature against the acceptance rate.
    Rng rng = make_stream(c.seed, 0, 4, StreamRole::oracle);
    const double mass = R.window.volume();
    const int n_max = c.n_max > 0 ? c.n_max : default_n_max(R.lambda, dom_level(R.model, R.lambda), mass);
    const auto z = z_bruteforce(R.model, R.lambda, all, R.gamma1, R.law, R.window, n_max, c.quad_budget, rng);
    RejectionStats stats;
    const Context<D> ctx(R.gamma1, R.window);
    const double alpha = dom_level(R.model, R.lambda);
    for(std::size_t r = 0; r < std::max<std::size_t>(reps, 1000); ++r) {
      gibbs_rejection_sample(R.model, R.lambda, all, ctx, R.law, R.window, alpha, rng, &stats);
    }
    const auto za = z_from_acceptance(stats, R.lambda, alpha, mass);
    const double err = std::hypot(z.mc_error, za.std_error) + z.truncation_error;
    const double gap = std::abs(z.value - za.value);
    results.push_back({"partition_dual_oracle", gap <= 3 * err + 1e-12, gap, err,
                       "quadrature=" + csv_num(z.value) + " acceptance=" + csv_num(za.value)});
  }
  return results;
}

template<int D>
int cmd_verify(const Resolved<D>& R, std::ostream& out, Format format) {
  const auto results = run_checks(R);
  std::size_t failed = 0;
  if(format == Format::csv) {
    out << "check,passed,statistic,p_value,detail\n";
  }
  for(const auto& r: results) {
    failed += r.passed ? 0 : 1;
    if(format == Format::csv) {
      out << r.name << "," << (r.passed ? 1 : 0) << "," << csv_num(r.statistic) << "," << csv_num(r.p_value) << ","
          << r.detail << "\n";
    } else {
      out << "{\"check\":\"" << r.name << "\",\"passed\":" << (r.passed ? "true" : "false")
          << ",\"statistic\":" << num(r.statistic) << ",\"p_value\":" << num(r.p_value)
          << ",\"detail\":" << json(r.detail).dump() << "}\n";
    }
  }
  if(format == Format::csv) {
    out << "# passed=" << results.size() - failed << " failed=" << failed << "\n";
  } else {
    out << "{\"summary\":{\"passed\":" << results.size() - failed << ",\"failed\":" << failed << "}}\n";
  }
  return failed == 0 ? 0 : 1;
}

/// Dispatches a subcommand on the configured dimension.
inline int run_command(const std::string& command, const RunConfig& config, std::ostream& out, Format format) {
  auto go = [&](auto dim) -> int {
    constexpr int D = decltype(dim)::value;
    const auto R = resolve<D>(config);
    if(command == "sample") {
      return cmd_sample(R, out, format);
    }
    if(command == "thin") {
      return cmd_thin(R, out, format);
    }
    if(command == "couple") {
      return cmd_couple(R, out, format);
    }
    if(command == "percolate") {
      return cmd_percolate(R, out, format);
    }
    if(command == "decay") {
      return cmd_decay(R, out, format);
    }
    if(command == "verify") {
      return cmd_verify(R, out, format);
    }
    throw ConfigError("unknown command '" + command + "'");
  };
  switch(config.dimension) {
    case 1: return go(std::integral_constant<int, 1>{});
    case 2: return go(std::integral_constant<int, 2>{});
    case 3: return go(std::integral_constant<int, 3>{});
    default: throw ConfigError("field 'dimension': must be 1, 2 or 3");
  }
}

}  // namespace gibbsdp::cli

#endif  // INCLUDE_GIBBSDP_CLI_HPP
