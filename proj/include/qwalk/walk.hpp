#pragma once

// Three-state quantum walk on the integer line: coin operator, eigenbasis,
// symmetric mixing-angle input states and the exact unitary step.

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace qwalk {

using Amplitude = std::complex<double>;
using RealVector3 = std::array<double, 3>;
using RealMatrix3 = std::array<RealVector3, 3>;

// Coin basis order is (L, S, R).
enum class Chirality : int { left = 0, stay = 1, right = 2 };

/// Coin parameter rho in [0, 1]; sets the ballistic front speed.
/// The endpoints give trivial dynamics and are reported as degenerate.
class CoinParameter {
 public:
  explicit CoinParameter(double rho);

  double value() const { return rho_; }
  bool degenerate() const { return rho_ == 0.0 || rho_ == 1.0; }

  friend bool operator==(const CoinParameter&, const CoinParameter&) = default;

 private:
  double rho_;
};

/// Mixing angle theta in [0, pi] of the input cos(theta)|S> + sin(theta)|phi>.
class MixingAngle {
 public:
  explicit MixingAngle(double theta);

  double value() const { return theta_; }

  friend bool operator==(const MixingAngle&, const MixingAngle&) = default;

 private:
  double theta_;
};

struct CoinOperator {
  double rho = 0.0;
  RealMatrix3 matrix{};
  RealVector3 sigma_plus{};    // eigenvalue +1
  RealVector3 sigma1_minus{};  // eigenvalue -1, delocalizing
  RealVector3 sigma2_minus{};  // eigenvalue -1, antisymmetric
  RealVector3 eigenvalues{1.0, -1.0, -1.0};

  RealVector3 apply(const RealVector3& v) const;
};

/// Coefficients of a coin state in the (sigma+, sigma1-, sigma2-) eigenbasis.
struct InputDecomposition {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;

  RealVector3 reconstruct(const CoinOperator& coin) const;
};

CoinOperator build_coin(CoinParameter rho);

/// Detrapping angle arccos(-sqrt(1 - rho^2)), always in [pi/2, pi].
MixingAngle theta_c(CoinParameter rho);

/// Coin part (sin/sqrt2, cos, sin/sqrt2) of the symmetric input.
RealVector3 symmetric_coin_state(MixingAngle theta);

/// Closed-form decomposition of the symmetric input; gamma is exactly 0.
InputDecomposition decompose_symmetric_input(MixingAngle theta, CoinParameter rho);

/// Projection of an arbitrary real coin vector onto the eigenbasis.
InputDecomposition decompose(const RealVector3& coin_state, const CoinOperator& coin);

struct Spinor {
  Amplitude left{};
  Amplitude stay{};
  Amplitude right{};

  double norm_squared() const { return std::norm(left) + std::norm(stay) + std::norm(right); }

  friend bool operator==(const Spinor&, const Spinor&) = default;
};

/// Full walker state on the sites [-capacity, capacity].
///
/// `reach()` bounds the support: every site with |x| > reach holds zero
/// amplitude. A step widens the reach by one and refuses to run once the
/// reach would leave the lattice, so nothing is ever truncated.
class WalkState {
 public:
  explicit WalkState(int capacity);

  int capacity() const { return capacity_; }
  int reach() const { return reach_; }
  long time() const { return time_; }
  std::size_t size() const { return sites_.size(); }

  const Spinor& at(int x) const { return sites_[index(x)]; }
  void set(int x, const Spinor& value);

  /// Sites in lattice order, element i sits at x = i - capacity().
  std::span<const Spinor> sites() const { return sites_; }

  double norm_squared() const;

  friend void step(WalkState& state, const CoinOperator& coin);

 private:
  std::size_t index(int x) const;

  int capacity_;
  int reach_ = 0;
  long time_ = 0;
  std::vector<Spinor> sites_;
};

/// One application of U = S (C x I): coin on every site, then L moves left,
/// R moves right and S stays. Throws CapacityError if the support would
/// reach past the lattice.
void step(WalkState& state, const CoinOperator& coin);

struct InitialCondition {
  WalkState state;
  InputDecomposition decomposition;
};

/// Walker localized at x = 0 with the symmetric mixing-angle coin state.
InitialCondition initial_state(MixingAngle theta, CoinParameter rho, int capacity);

}  // namespace qwalk
