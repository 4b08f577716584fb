#ifndef INCLUDE_GIBBSDP_COUPLING_HPP
#define INCLUDE_GIBBSDP_COUPLING_HPP

// Disagreement coupling built layer by layer.
//
// Layer t works on D_t = {X in Delta : B(X) misses B_0 u ... u B_{t-1}} with
// B_0 = gamma1 u gamma2 and B_{t+1} = the points of both copies drawn in
// Gamma_t = {X in D_t : B(X) meets B_t}. One Poisson draw on D_t is thinned
// twice (boundaries gamma^i plus the points already fixed for copy i) and
// the three configurations are kept on Gamma_t only. When Gamma_t is empty
// both copies take the same thinning of D_t with an empty boundary.

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "models.hpp"
#include "poisson.hpp"
#include "rng.hpp"
#include "space.hpp"
#include "thinning.hpp"

namespace gibbsdp {

template<int D>
struct CouplingLayer {
  Configuration<D> sources;  // B_t
  Configuration<D> omega1;   // on Gamma_t (or D_t for the agreement layer)
  Configuration<D> omega2;
  Configuration<D> omega3;
  bool agreement{false};
};

template<int D>
struct CouplingSample {
  Configuration<D> xi1;
  Configuration<D> xi2;
  Configuration<D> xi3;
  Configuration<D> gamma1;
  Configuration<D> gamma2;
  std::vector<CouplingLayer<D>> layers;

  std::size_t depth() const { return layers.size(); }
  std::size_t disagreements() const { return symmetric_difference(xi1, xi2).size(); }
};

struct DepthCapExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CouplingOptions {
  std::size_t depth_cap{10000};
  // Same keep/drop stream for both copies.
  bool shared_streams{false};
  // Swap the roles of the two thinning streams.
  bool swap_streams{false};
  ThinningOptions thinning{};
};

/// Whether some ball of Delta can meet some ball of `sources`.
template<int D>
inline bool may_touch_window(const Configuration<D>& sources, const Window<D>& window) {
  BoxProbe<D> box{window.lo(), window.hi()};
  for(const auto& y: sources) {
    const i128 reach = static_cast<i128>(y.radius) + window.r_max_raw();
    if(squared_distance_to_box<D>(y.center, box) <= reach * reach) {
      return true;
    }
  }
  return false;
}

template<int D>
struct Thin2Result {
  Configuration<D> omega1;
  Configuration<D> omega2;
  Configuration<D> omega3;
};

/// One Poisson draw on the domain thinned twice with boundaries gamma1, gamma2.
template<typename Model, int D>
Thin2Result<D> thin2_sample(const Model& model, double lambda, double alpha, const RadiusLaw& law,
                            const Window<D>& window, const OrderInterval<D>& domain, const Configuration<D>& gamma1,
                            const Configuration<D>& gamma2, Rng& poisson_rng, Rng& thin1_rng, Rng& thin2_rng,
                            const ThinningOptions& options = {}) {
  Thin2Result<D> out;
  if(alpha == 0) {
    return out;
  }
  out.omega3 = sample_poisson_on(domain, window, alpha, law, poisson_rng);
  const auto k1 = ThinningKernel<Model, D>::make(model, lambda, law, window, domain, gamma1, alpha);
  const auto k2 = ThinningKernel<Model, D>::make(model, lambda, law, window, domain, gamma2, alpha);
  out.omega1 = thin_configuration(k1, out.omega3, thin1_rng, options).kept;
  out.omega2 = thin_configuration(k2, out.omega3, thin2_rng, options).kept;
  return out;
}

template<typename Model, int D>
CouplingSample<D> disagreement_sample(const Model& model, double lambda, double alpha, const RadiusLaw& law,
                                      const Window<D>& window, const Configuration<D>& gamma1,
                                      const Configuration<D>& gamma2, std::uint64_t seed, std::uint64_t replicate,
                                      const CouplingOptions& options = {}) {
  if(!model.is_local()) {
    throw std::invalid_argument("disagreement_sample: model does not satisfy (Loc)");
  }
  for(const auto* g: {&gamma1, &gamma2}) {
    for(const auto& y: *g) {
      if(window.contains_center(y.center)) {
        throw std::invalid_argument("disagreement_sample: boundary point inside the window");
      }
    }
  }
  CouplingSample<D> sample;
  sample.gamma1 = gamma1;
  sample.gamma2 = gamma2;
  Configuration<D> blocked;                   // B_0 u ... u B_{t-1}
  Configuration<D> sources = merge(gamma1, gamma2);  // B_t
  for(std::uint64_t t = 0;; ++t) {
    if(t >= options.depth_cap) {
      std::ostringstream trace;
      trace << "disagreement_sample: depth cap " << options.depth_cap << " exceeded; layer sizes:";
      for(const auto& layer: sample.layers) {
        trace << ' ' << layer.omega3.size();
      }
      throw DepthCapExceeded(trace.str());
    }
    Rng poisson_rng = make_stream(seed, replicate, t, StreamRole::poisson);
    const StreamRole r1 = options.swap_streams ? StreamRole::thin2 : StreamRole::thin1;
    const StreamRole r2 = options.shared_streams ? r1 : (options.swap_streams ? StreamRole::thin1 : StreamRole::thin2);
    Rng thin1_rng = make_stream(seed, replicate, t, r1);
    Rng thin2_rng = make_stream(seed, replicate, t, r2);
    OrderInterval<D> domain;
    domain.region.blocked = blocked;
    CouplingLayer<D> layer;
    layer.sources = sources;
    if(sources.empty() || !may_touch_window(sources, window)) {
      layer.agreement = true;
      const auto kernel = ThinningKernel<Model, D>::make(model, lambda, law, window, domain, {}, alpha);
      auto res = thin_sample(kernel, poisson_rng, options.thinning);
      // thin_sample draws its Poisson points from the stream it is given; the
      // keep/drop coins for the agreement layer share that stream.
      layer.omega1 = res.kept;
      layer.omega2 = res.kept;
      layer.omega3 = res.poisson;
      for(const auto& p: res.kept) {
        sample.xi1.insert(p);
        sample.xi2.insert(p);
      }
      for(const auto& p: res.poisson) {
        sample.xi3.insert(p);
      }
      sample.layers.push_back(std::move(layer));
      return sample;
    }
    const auto pair = thin2_sample(model, lambda, alpha, law, window, domain, merge(gamma1, sample.xi1),
                                   merge(gamma2, sample.xi2), poisson_rng, thin1_rng, thin2_rng, options.thinning);
    // Project onto Gamma_t.
    Region<D> zone;
    zone.blocked = blocked;
    zone.required = sources;
    Configuration<D> next;
    for(const auto& p: pair.omega3) {
      if(!zone.contains(p)) {
        continue;
      }
      layer.omega3.insert(p);
      sample.xi3.insert(p);
      if(pair.omega1.contains(p)) {
        layer.omega1.insert(p);
        sample.xi1.insert(p);
        next.try_insert(p);
      }
      if(pair.omega2.contains(p)) {
        layer.omega2.insert(p);
        sample.xi2.insert(p);
        next.try_insert(p);
      }
    }
    sample.layers.push_back(std::move(layer));
    for(const auto& p: sources) {
      blocked.try_insert(p);
    }
    sources = std::move(next);
  }
}

struct DisagreementReport {
  bool subset_ok{true};
  bool connectivity_ok{true};
  std::vector<std::string> violations;

  bool ok() const { return subset_ok && connectivity_ok; }
};

/// Exact per-sample checks: xi1 u xi2 in xi3, and every disagreement point
/// joined to gamma1 u gamma2 through xi3.
template<int D>
DisagreementReport verify_disagreement(const CouplingSample<D>& sample) {
  DisagreementReport report;
  const auto describe = [](const Point<D>& p) {
    std::ostringstream s;
    s << '(';
    for(int i = 0; i < D; ++i) {
      s << p.x(i) << ',';
    }
    s << p.r() << ')';
    return s.str();
  };
  for(const auto* xi: {&sample.xi1, &sample.xi2}) {
    for(const auto& p: *xi) {
      if(!sample.xi3.contains(p)) {
        report.subset_ok = false;
        report.violations.push_back("subset: " + describe(p) + " missing from xi3");
      }
    }
  }
  const Probe<D> boundary = ConfigurationProbe<D>{merge(sample.gamma1, sample.gamma2)};
  for(const auto& p: symmetric_difference(sample.xi1, sample.xi2)) {
    if(!connected(sample.xi3, Probe<D>{BallProbe<D>{p}}, boundary)) {
      report.connectivity_ok = false;
      std::string where = "unknown layer";
      for(std::size_t t = 0; t < sample.layers.size(); ++t) {
        if(sample.layers[t].omega3.contains(p)) {
          where = "layer " + std::to_string(t);
        }
      }
      report.violations.push_back("connectivity: " + describe(p) + " (" + where + ") not joined to the boundary");
    }
  }
  return report;
}

}  // namespace gibbsdp

#endif  // INCLUDE_GIBBSDP_COUPLING_HPP
