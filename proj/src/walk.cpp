#include "qwalk/walk.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qwalk/errors.hpp"

#if defined(__SSE__) || defined(_M_X64)
#include <xmmintrin.h>
#define QWALK_HAS_MXCSR 1
#endif

namespace qwalk {

namespace {

// Amplitudes ahead of the ballistic front decay faster than exponentially and
// underflow into subnormals, which are two orders of magnitude slower on x86.
// Flushing them to zero only touches values below 2.2e-308.
class FlushSubnormals {
 public:
  FlushSubnormals() {
#ifdef QWALK_HAS_MXCSR
    saved_ = _mm_getcsr();
    _mm_setcsr(saved_ | 0x8040u);  // FTZ | DAZ
#endif
  }
  ~FlushSubnormals() {
#ifdef QWALK_HAS_MXCSR
    _mm_setcsr(saved_);
#endif
  }
  FlushSubnormals(const FlushSubnormals&) = delete;
  FlushSubnormals& operator=(const FlushSubnormals&) = delete;

 private:
  unsigned int saved_ = 0;
};

// Entries of [[a, b, c], [b, d, b], [c, b, a]].
struct CoinEntries {
  double a, b, c, d;
};

// In place, sweeping left to right over [first, last]. L lands on the
// already-consumed site to the left; the outgoing R value is carried one site
// and written after that site's old R has been read.
void sweep_coin_shift(Spinor* p, std::size_t first, std::size_t last, const CoinEntries& k) {
  const double a = k.a, b = k.b, c = k.c, d = k.d;
  Amplitude carried_right{};
  for (std::size_t i = first; i <= last; ++i) {
    const Amplitude l = p[i].left;
    const Amplitude s = p[i].stay;
    const Amplitude r = p[i].right;
    p[i - 1].left = a * l + b * s + c * r;
    p[i].stay = b * l + d * s + b * r;
    const Amplitude out_r = c * l + b * s + a * r;
    p[i].right = carried_right;
    carried_right = out_r;
  }
  p[last].left = Amplitude{};
  p[last + 1].right = carried_right;
}

void sweep_coin_shift(Spinor* p, std::size_t first, std::size_t last, const RealMatrix3 m) {
  Amplitude carried_right{};
  for (std::size_t i = first; i <= last; ++i) {
    const Amplitude l = p[i].left;
    const Amplitude s = p[i].stay;
    const Amplitude r = p[i].right;
    p[i - 1].left = m[0][0] * l + m[0][1] * s + m[0][2] * r;
    p[i].stay = m[1][0] * l + m[1][1] * s + m[1][2] * r;
    const Amplitude out_r = m[2][0] * l + m[2][1] * s + m[2][2] * r;
    p[i].right = carried_right;
    carried_right = out_r;
  }
  p[last].left = Amplitude{};
  p[last + 1].right = carried_right;
}

}  // namespace

CoinParameter::CoinParameter(double rho) : rho_(rho) {
  if (!(rho >= 0.0 && rho <= 1.0)) {
    throw DomainError("coin parameter rho must lie in [0, 1], got " + std::to_string(rho));
  }
}

MixingAngle::MixingAngle(double theta) : theta_(theta) {
  if (!(theta >= 0.0 && theta <= std::numbers::pi)) {
    throw DomainError("mixing angle theta must lie in [0, pi], got " + std::to_string(theta));
  }
}

RealVector3 CoinOperator::apply(const RealVector3& v) const {
  RealVector3 out{};
  for (std::size_t i = 0; i < 3; ++i) {
    out[i] = matrix[i][0] * v[0] + matrix[i][1] * v[1] + matrix[i][2] * v[2];
  }
  return out;
}

RealVector3 InputDecomposition::reconstruct(const CoinOperator& coin) const {
  RealVector3 out{};
  for (std::size_t i = 0; i < 3; ++i) {
    out[i] = alpha * coin.sigma_plus[i] + beta * coin.sigma1_minus[i] + gamma * coin.sigma2_minus[i];
  }
  return out;
}

CoinOperator build_coin(CoinParameter rho_param) {
  const double rho = rho_param.value();
  const double rho2 = rho * rho;
  const double off = rho * std::sqrt(2.0 - 2.0 * rho2);
  const double cross = std::sqrt((1.0 - rho2) / 2.0);
  const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;

  CoinOperator coin;
  coin.rho = rho;
  coin.matrix = {{{-rho2, off, 1.0 - rho2}, {off, 2.0 * rho2 - 1.0, off}, {1.0 - rho2, off, -rho2}}};
  coin.sigma_plus = {cross, rho, cross};
  coin.sigma1_minus = {rho * inv_sqrt2, -std::sqrt(1.0 - rho2), rho * inv_sqrt2};
  coin.sigma2_minus = {inv_sqrt2, 0.0, -inv_sqrt2};
  return coin;
}

MixingAngle theta_c(CoinParameter rho) {
  const double r = rho.value();
  return MixingAngle(std::acos(-std::sqrt(1.0 - r * r)));
}

RealVector3 symmetric_coin_state(MixingAngle theta) {
  const double side = std::sin(theta.value()) / std::numbers::sqrt2;
  return {side, std::cos(theta.value()), side};
}

InputDecomposition decompose_symmetric_input(MixingAngle theta, CoinParameter rho) {
  const double r = rho.value();
  const double c = std::sqrt(1.0 - r * r);
  const double sin_t = std::sin(theta.value());
  const double cos_t = std::cos(theta.value());
  return {r * cos_t + c * sin_t, r * sin_t - c * cos_t, 0.0};
}

InputDecomposition decompose(const RealVector3& v, const CoinOperator& coin) {
  auto dot = [](const RealVector3& a, const RealVector3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; };
  return {dot(coin.sigma_plus, v), dot(coin.sigma1_minus, v), dot(coin.sigma2_minus, v)};
}

WalkState::WalkState(int capacity) : capacity_(capacity) {
  if (capacity < 1) {
    throw DomainError("lattice capacity must be at least 1, got " + std::to_string(capacity));
  }
  sites_.assign(2 * static_cast<std::size_t>(capacity) + 1, Spinor{});
}

std::size_t WalkState::index(int x) const {
  if (x < -capacity_ || x > capacity_) {
    throw DomainError("site " + std::to_string(x) + " outside lattice of capacity " + std::to_string(capacity_));
  }
  return static_cast<std::size_t>(x + capacity_);
}

void WalkState::set(int x, const Spinor& value) {
  sites_[index(x)] = value;
  reach_ = std::max(reach_, std::abs(x));
}

double WalkState::norm_squared() const {
  double total = 0.0;
  for (const auto& s : sites_) total += s.norm_squared();
  return total;
}

void step(WalkState& state, const CoinOperator& coin) {
  const int reach = state.reach_;
  if (reach + 1 > state.capacity_) {
    throw CapacityError("walker would leave the lattice at step " + std::to_string(state.time_ + 1) +
                        " (capacity " + std::to_string(state.capacity_) + ")");
  }
  const FlushSubnormals ftz;
  const std::size_t first = static_cast<std::size_t>(state.capacity_ - reach);
  const std::size_t last = static_cast<std::size_t>(state.capacity_ + reach);
  const RealMatrix3& m = coin.matrix;
  Spinor* p = state.sites_.data();
  if (m[1][0] == m[0][1] && m[2][1] == m[0][1] && m[1][2] == m[0][1] && m[2][0] == m[0][2] && m[2][2] == m[0][0]) {
    // C(rho) has only four distinct entries; naming them keeps the loop in registers.
    sweep_coin_shift(p, first, last, CoinEntries{m[0][0], m[0][1], m[0][2], m[1][1]});
  } else {
    sweep_coin_shift(p, first, last, m);
  }
  state.reach_ = reach + 1;
  ++state.time_;
}

InitialCondition initial_state(MixingAngle theta, CoinParameter rho, int capacity) {
  WalkState state(capacity);
  const RealVector3 coin_state = symmetric_coin_state(theta);
  state.set(0, Spinor{coin_state[0], coin_state[1], coin_state[2]});
  return {std::move(state), decompose_symmetric_input(theta, rho)};
}

}  // namespace qwalk
