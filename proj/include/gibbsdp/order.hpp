#ifndef INCLUDE_GIBBSDP_ORDER_HPP
#define INCLUDE_GIBBSDP_ORDER_HPP

// The measurable total order on Delta: bit interleaving of the translated
// coordinates (spatial axes first, radius last), its dyadic block structure,
// and the measure Q* = (Lebesgue x Q) transported to key space.

#include <array>
#include <bit>
#include <cmath>
#include <compare>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "radius_law.hpp"
#include "space.hpp"

namespace gibbsdp {

/// Unsigned 256-bit key; bit n is the coefficient of 2^n in grid units.
class OrderKey {
 public:
  static constexpr int kBits = 256;

  constexpr OrderKey() = default;
  explicit constexpr OrderKey(std::uint64_t low) : words_{low, 0, 0, 0} {}

  static OrderKey power_of_two(int n) {
    OrderKey k;
    k.set_bit(n, true);
    return k;
  }

  bool bit(int n) const { return (words_[n >> 6] >> (n & 63)) & 1u; }
  void set_bit(int n, bool value) {
    const std::uint64_t mask = std::uint64_t{1} << (n & 63);
    if(value) {
      words_[n >> 6] |= mask;
    } else {
      words_[n >> 6] &= ~mask;
    }
  }

  bool is_zero() const { return (words_[0] | words_[1] | words_[2] | words_[3]) == 0; }

  // Number of trailing zero bits (kBits for zero).
  int trailing_zeros() const {
    for(int w = 0; w < 4; ++w) {
      if(words_[w] != 0) {
        return 64 * w + std::countr_zero(words_[w]);
      }
    }
    return kBits;
  }

  OrderKey& operator+=(const OrderKey& other) {
    unsigned carry = 0;
    for(int w = 0; w < 4; ++w) {
      const std::uint64_t a = words_[w];
      const std::uint64_t s = a + other.words_[w];
      const unsigned c1 = s < a;
      const std::uint64_t t = s + carry;
      const unsigned c2 = t < s;
      words_[w] = t;
      carry = c1 | c2;
    }
    return *this;
  }

  OrderKey& operator-=(const OrderKey& other) {
    unsigned borrow = 0;
    for(int w = 0; w < 4; ++w) {
      const std::uint64_t a = words_[w];
      const std::uint64_t d = a - other.words_[w];
      const unsigned b1 = a < other.words_[w];
      const std::uint64_t t = d - borrow;
      const unsigned b2 = d < borrow;
      words_[w] = t;
      borrow = b1 | b2;
    }
    return *this;
  }

  friend OrderKey operator+(OrderKey a, const OrderKey& b) { return a += b; }
  friend OrderKey operator-(OrderKey a, const OrderKey& b) { return a -= b; }

  OrderKey next() const { return *this + OrderKey(1); }

  // Clears the lowest n bits.
  OrderKey aligned_down(int n) const {
    OrderKey k = *this;
    for(int i = 0; i < n && i < kBits; ++i) {
      k.set_bit(i, false);
    }
    return k;
  }

  std::uint64_t word(int w) const { return words_[w]; }

  // Approximate magnitude as a double (for diagnostics only).
  double to_double() const {
    double v = 0.0;
    for(int w = 3; w >= 0; --w) {
      v = v * 18446744073709551616.0 + static_cast<double>(words_[w]);
    }
    return v;
  }

  std::string to_hex() const {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    bool started = false;
    for(int n = kBits - 4; n >= 0; n -= 4) {
      const unsigned nibble = (words_[n >> 6] >> (n & 63)) & 0xF;
      if(nibble != 0 || started || n == 0) {
        started = true;
        out.push_back(digits[nibble]);
      }
    }
    return out;
  }

  friend bool operator==(const OrderKey&, const OrderKey&) = default;
  friend std::strong_ordering operator<=>(const OrderKey& a, const OrderKey& b) {
    for(int w = 3; w >= 0; --w) {
      if(a.words_[w] != b.words_[w]) {
        return a.words_[w] <=> b.words_[w];
      }
    }
    return std::strong_ordering::equal;
  }

 private:
  std::array<std::uint64_t, 4> words_{};
};

/// Interleaves m components of `digits` binary digits each: output bit
/// n = j * m + i holds digit j of component i.
inline OrderKey interleave(std::span<const std::uint64_t> components, int digits) {
  const int m = static_cast<int>(components.size());
  if(m < 1 || m * digits > OrderKey::kBits || digits > 64) {
    throw std::invalid_argument("interleave: unsupported layout");
  }
  OrderKey key;
  for(int i = 0; i < m; ++i) {
    if(digits < 64 && (components[i] >> digits) != 0) {
      throw std::out_of_range("interleave: component exceeds digit budget");
    }
    for(int j = 0; j < digits; ++j) {
      if((components[i] >> j) & 1u) {
        key.set_bit(j * m + i, true);
      }
    }
  }
  return key;
}

inline std::vector<std::uint64_t> deinterleave(const OrderKey& key, int m, int digits) {
  std::vector<std::uint64_t> components(static_cast<std::size_t>(m), 0);
  for(int j = 0; j < digits; ++j) {
    for(int i = 0; i < m; ++i) {
      if(key.bit(j * m + i)) {
        components[static_cast<std::size_t>(i)] |= std::uint64_t{1} << j;
      }
    }
  }
  return components;
}

template<int D>
inline constexpr int key_components() {
  return D + 1;
}

template<int D>
inline int key_bits(const Window<D>& window) {
  return key_components<D>() * window.digits();
}

/// One past the largest key of the window: the "+infinity" end of Delta.
template<int D>
inline OrderKey key_end(const Window<D>& window) {
  return OrderKey::power_of_two(key_bits(window));
}

/// B(X): translate into the nonnegative orthant and interleave.
template<int D>
inline OrderKey encode(const Point<D>& p, const Window<D>& window) {
  const int shift = kFracBits - window.frac_bits();
  const std::uint64_t limit = std::uint64_t{1} << window.digits();
  std::array<std::uint64_t, D + 1> comps{};
  for(int i = 0; i < D; ++i) {
    const std::int64_t rel = p.center[i] - window.lo()[i];
    if(rel < 0 || !on_grid(rel, window.frac_bits())) {
      throw std::out_of_range("encode: coordinate outside the window or not on the W-bit grid");
    }
    comps[i] = static_cast<std::uint64_t>(rel >> shift);
  }
  if(p.radius < 0 || !on_grid(p.radius, window.frac_bits())) {
    throw std::out_of_range("encode: radius negative or not on the W-bit grid");
  }
  comps[D] = static_cast<std::uint64_t>(p.radius >> shift);
  for(const auto c: comps) {
    if(c >= limit) {
      throw std::out_of_range("encode: coordinate exceeds the key range");
    }
  }
  return interleave(comps, window.digits());
}

template<int D>
inline Point<D> decode(const OrderKey& key, const Window<D>& window) {
  const int shift = kFracBits - window.frac_bits();
  const auto comps = deinterleave(key, D + 1, window.digits());
  Point<D> p;
  for(int i = 0; i < D; ++i) {
    p.center[i] = window.lo()[i] + static_cast<std::int64_t>(comps[i] << shift);
  }
  p.radius = static_cast<std::int64_t>(comps[D] << shift);
  return p;
}

template<int D>
inline std::strong_ordering compare(const Point<D>& a, const Point<D>& b, const Window<D>& window) {
  return encode(a, window) <=> encode(b, window);
}

/// Sorts a configuration increasingly in the key order.
template<int D>
inline std::vector<Point<D>> sorted_by_order(const Configuration<D>& omega, const Window<D>& window) {
  std::vector<std::pair<OrderKey, Point<D>>> keyed;
  keyed.reserve(omega.size());
  for(const auto& p: omega) {
    keyed.emplace_back(encode(p, window), p);
  }
  std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Point<D>> out;
  out.reserve(keyed.size());
  for(auto& kp: keyed) {
    out.push_back(kp.second);
  }
  return out;
}

/// An aligned key block [prefix, prefix + 2^free_bits).
struct KeyBlock {
  OrderKey start;
  int free_bits;
};

/// Splits [lo, hi) into maximal aligned key blocks, in increasing order.
inline std::vector<KeyBlock> decompose(OrderKey lo, const OrderKey& hi, int total_bits) {
  std::vector<KeyBlock> blocks;
  while(lo < hi) {
    int k = std::min(lo.trailing_zeros(), total_bits);
    while(k > 0 && lo + OrderKey::power_of_two(k) > hi) {
      --k;
    }
    blocks.push_back({lo, k});
    lo += OrderKey::power_of_two(k);
  }
  return blocks;
}

/// The product box in component grid units covered by an aligned key block:
/// component i spans [lo[i], lo[i] + 2^width[i]).
struct BlockBox {
  std::vector<std::uint64_t> lo;
  std::vector<int> width;
};

inline BlockBox block_box(const KeyBlock& block, int m, int digits) {
  BlockBox box;
  box.lo = deinterleave(block.start, m, digits);
  box.width.resize(static_cast<std::size_t>(m));
  const int full = block.free_bits / m;
  const int extra = block.free_bits % m;
  for(int i = 0; i < m; ++i) {
    box.width[static_cast<std::size_t>(i)] = full + (i < extra ? 1 : 0);
  }
  return box;
}

/// Q*-mass of a key block restricted to Delta.
template<int D>
inline double block_mass(const KeyBlock& block, const RadiusLaw& law, const Window<D>& window) {
  const auto box = block_box(block, D + 1, window.digits());
  const double cell = std::ldexp(1.0, -window.frac_bits());
  double volume = 1.0;
  for(int i = 0; i < D; ++i) {
    const double lo = static_cast<double>(box.lo[i]);
    const double hi = lo + std::ldexp(1.0, box.width[i]);
    const double cells = static_cast<double>(window.cells(i));
    const double overlap = std::min(hi, cells) - lo;
    if(overlap <= 0) {
      return 0.0;
    }
    volume *= overlap * cell;
  }
  const double r_lo = static_cast<double>(box.lo[D]) * cell;
  const double r_hi = (static_cast<double>(box.lo[D]) + std::ldexp(1.0, box.width[D])) * cell;
  return volume * law.mass(r_lo, r_hi);
}

/// A half-open key interval [lo, hi) of Delta, hi = nullopt meaning the end
/// of Delta, optionally intersected with a Region.
template<int D>
struct OrderInterval {
  OrderKey lo{};
  std::optional<OrderKey> hi{};
  Region<D> region{};

  OrderKey upper(const Window<D>& window) const { return hi ? *hi : key_end(window); }
  bool restricted() const { return !region.is_full(); }
};

/// Estimate of a measure with its Monte-Carlo standard error (0 when exact).
struct MeasureEstimate {
  double value;
  double std_error;
};

template<int D>
inline double interval_mass(const OrderKey& lo, const OrderKey& hi, const RadiusLaw& law, const Window<D>& window) {
  if(!(lo < hi)) {
    return 0.0;
  }
  double total = 0.0;
  for(const auto& block: decompose(lo, hi, key_bits(window))) {
    total += block_mass(block, law, window);
  }
  return total;
}

/// Draws uniformly from Q* restricted to a key interval (no region filter).
template<int D>
class IntervalSampler {
 public:
  IntervalSampler(const OrderKey& lo, const OrderKey& hi, const RadiusLaw& law, const Window<D>& window)
      : law_(&law), window_(&window) {
    if(lo < hi) {
      for(const auto& block: decompose(lo, hi, key_bits(window))) {
        const double mass = block_mass(block, law, window);
        if(mass > 0) {
          blocks_.push_back(block_box(block, D + 1, window.digits()));
          cumulative_.push_back(total_ += mass);
        }
      }
    }
  }

  double mass() const { return total_; }

  template<typename Generator>
  Point<D> operator()(Generator& rng) const {
    if(blocks_.empty()) {
      throw std::logic_error("IntervalSampler: interval has zero mass");
    }
    std::uniform_real_distribution<double> u(0.0, total_);
    const double target = u(rng);
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
    if(it == cumulative_.end()) {
      --it;
    }
    const auto& box = blocks_[static_cast<std::size_t>(it - cumulative_.begin())];
    const int shift = kFracBits - window_->frac_bits();
    Point<D> p;
    for(int i = 0; i < D; ++i) {
      const std::uint64_t width = std::uint64_t{1} << box.width[i];
      const std::uint64_t cells = static_cast<std::uint64_t>(window_->cells(i));
      const std::uint64_t top = std::min(box.lo[i] + width, cells);
      std::uniform_int_distribution<std::uint64_t> cell(box.lo[i], top - 1);
      p.center[i] = window_->lo()[i] + static_cast<std::int64_t>(cell(rng) << shift);
    }
    const double step = std::ldexp(1.0, -window_->frac_bits());
    const double r_lo = static_cast<double>(box.lo[D]) * step;
    const double r_hi = (static_cast<double>(box.lo[D]) + std::ldexp(1.0, box.width[D])) * step;
    const double r = law_->sample_in(r_lo, r_hi, rng);
    std::int64_t raw = floor_to_grid(static_cast<std::int64_t>(std::floor(r * kScale)), window_->frac_bits());
    const std::int64_t raw_lo = static_cast<std::int64_t>(box.lo[D] << shift);
    raw = std::max(raw, raw_lo);
    p.radius = raw;
    return p;
  }

 private:
  const RadiusLaw* law_;
  const Window<D>* window_;
  std::vector<BlockBox> blocks_;
  std::vector<double> cumulative_;
  double total_{0.0};
};

/// Q*-mass of an order interval. Exact without a region; with a region the
/// block masses are multiplied by a Monte-Carlo membership fraction.
template<int D, typename Generator>
inline MeasureEstimate interval_measure(const OrderInterval<D>& iv, const RadiusLaw& law, const Window<D>& window,
                                        Generator& rng, std::size_t budget = 20000) {
  if(std::abs(law.cdf(window.r_max()) - 1.0) > 1e-12) {
    throw std::invalid_argument("interval_measure: radius law not normalized on [0, r_max]");
  }
  const OrderKey hi = iv.upper(window);
  if(!iv.restricted()) {
    return {interval_mass(iv.lo, hi, law, window), 0.0};
  }
  if(iv.region.trivially_empty()) {
    return {0.0, 0.0};
  }
  IntervalSampler<D> sampler(iv.lo, hi, law, window);
  if(sampler.mass() <= 0 || budget == 0) {
    return {0.0, 0.0};
  }
  std::size_t hits = 0;
  for(std::size_t s = 0; s < budget; ++s) {
    if(iv.region.contains(sampler(rng))) {
      ++hits;
    }
  }
  const double frac = static_cast<double>(hits) / static_cast<double>(budget);
  const double se = std::sqrt(frac * (1.0 - frac) / static_cast<double>(budget));
  return {sampler.mass() * frac, sampler.mass() * se};
}

template<int D>
inline double interval_measure(const OrderInterval<D>& iv, const RadiusLaw& law, const Window<D>& window) {
  if(iv.restricted()) {
    throw std::invalid_argument("interval_measure: region-restricted intervals need an RNG stream");
  }
  std::mt19937_64 unused(0);
  return interval_measure(iv, law, window, unused).value;
}

/// The smallest key K >= key(X) with Q*([key(X), K)) >= eps, returned as a key.
/// Returns key_end when eps equals the remaining mass.
template<int D>
inline OrderKey successor_key_at_mass(const OrderKey& from, double eps, const RadiusLaw& law, const Window<D>& window) {
  const OrderKey end = key_end(window);
  const double remaining = interval_mass(from, end, law, window);
  if(!(eps >= 0)) {
    throw std::invalid_argument("successor_at_mass: eps must be nonnegative");
  }
  if(eps > remaining * (1 + 1e-12)) {
    throw std::domain_error("successor_at_mass: insufficient remaining mass");
  }
  if(eps <= 0) {
    return from;
  }
  if(eps >= remaining * (1 - 1e-15)) {
    return end;
  }
  // Largest K with mass([from, K)) < eps, built bit by bit; the answer is K + 1.
  OrderKey k;
  for(int b = key_bits(window) - 1; b >= 0; --b) {
    OrderKey cand = k;
    cand.set_bit(b, true);
    if(cand <= from || interval_mass(from, cand, law, window) < eps) {
      k = cand;
    }
  }
  return k.next();
}

/// X_eps^+: the point at which the order interval starting at X has mass eps.
template<int D>
inline Point<D> successor_at_mass(const Point<D>& x, double eps, const RadiusLaw& law, const Window<D>& window) {
  return decode(successor_key_at_mass(encode(x, window), eps, law, window), window);
}

}  // namespace gibbsdp

#endif  // INCLUDE_GIBBSDP_ORDER_HPP
