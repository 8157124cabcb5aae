#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace semiheat {

/// Problem parameters for u_t - Δu = |u|^{p-1} u in R^n, with the derived
/// critical quantities.
struct ModelParams {
  int n = 0;
  double p = 0.0;
  double p_S = 0.0;   ///< Sobolev exponent (n+2)/(n-2)
  double beta = 0.0;  ///< 1/(p-1)
  double mu = 0.0;    ///< 4/(p-1), the critical Morrey index for q = 2
  double q_c = 0.0;   ///< n(p-1)/2
  bool supercritical = false;

  /// Decay exponent 2/(p-1) of the scale-invariant profile.
  double tail_exponent() const { return 2.0 * beta; }
  /// Morrey index λ = 2q/(p-1) paired with q.
  double critical_lambda(double q) const { return 2.0 * q * beta; }
};

/// Throws std::invalid_argument when n < 3 or p <= 1.
ModelParams make_params(int n, double p);

/// Uniform radial grid r_i = i h, i = 0..M, with r_M = R_max.
class RadialGrid {
 public:
  RadialGrid(int n, double r_max, int intervals);

  int dim() const { return n_; }
  double r_max() const { return r_max_; }
  int intervals() const { return intervals_; }
  std::size_t size() const { return static_cast<std::size_t>(intervals_) + 1; }
  double h() const { return h_; }
  double node(std::size_t i) const { return static_cast<double>(i) * h_; }
  std::vector<double> nodes() const;

  bool operator==(const RadialGrid& other) const = default;

 private:
  int n_;
  double r_max_;
  int intervals_;
  double h_;
};

enum class BoundaryTag { dirichlet_at_rmax, even_at_origin_only };

std::string to_string(BoundaryTag tag);
BoundaryTag boundary_from_string(const std::string& name);

/// A radial function sampled at the grid nodes. Values beyond R_max are
/// taken as zero by every kernel.
class RadialField {
 public:
  RadialField(RadialGrid grid, std::vector<double> values,
              BoundaryTag boundary = BoundaryTag::dirichlet_at_rmax);

  static RadialField zero(const RadialGrid& grid,
                          BoundaryTag boundary = BoundaryTag::dirichlet_at_rmax);
  /// Samples fn at the nodes. Under dirichlet_at_rmax the last node is set to 0.
  static RadialField sample(const RadialGrid& grid, const std::function<double(double)>& fn,
                            BoundaryTag boundary = BoundaryTag::dirichlet_at_rmax);

  const RadialGrid& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  const std::vector<double>& data() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }
  BoundaryTag boundary() const { return boundary_; }
  int dim() const { return grid_.dim(); }

  RadialField scaled(double factor) const;
  RadialField abs_pow(double q) const;  ///< |f|^q as a field
  RadialField operator-(const RadialField& other) const;
  RadialField operator*(const RadialField& other) const;

 private:
  RadialGrid grid_;
  std::vector<double> values_;
  BoundaryTag boundary_;
};

double sup_norm(const RadialField& f);
/// max_i r_i^k |u_i|; equals sup_norm for k = 0.
double weighted_sup_norm(const RadialField& f, double k);
/// Index of the node where |u| is maximal (first one on ties).
std::size_t argmax_abs(const RadialField& f);

/// u_λ(r) = λ^{2/(p-1)} u(λ r), resampled onto the same grid by monotone
/// cubic interpolation. Values needed beyond R_max are zero.
RadialField rescale_field(const RadialField& f, double lambda, const ModelParams& params);

/// Centered differences, zero slope at the origin, one-sided at R_max.
RadialField finite_difference_gradient(const RadialField& f);

// Analytic initial-data families. Each carries its radial derivative so that
// hypothesis checks and gradient bounds can use exact |∇u0|.
struct Profile {
  enum class Kind { gaussian, plateau, power_tail, indicator, singular_steady_state };
  Kind kind = Kind::gaussian;
  double amplitude = 1.0;
  double width = 1.0;     // gaussian
  double radius = 1.0;    // plateau, indicator
  double ramp = 1.0;      // plateau
  double exponent = 2.0;  // power_tail
  double core_radius = 1.0;

  static Profile gaussian(double amplitude, double width);
  static Profile plateau(double amplitude, double radius, double ramp);
  static Profile power_tail(double amplitude, double exponent, double core_radius);
  static Profile indicator(double radius);
  static Profile singular_steady_state();

  Profile scaled(double factor) const;

  double value(double r, const ModelParams& params, double r_cap) const;
  double derivative(double r, const ModelParams& params, double r_cap) const;

  RadialField sample(const RadialGrid& grid, const ModelParams& params,
                     BoundaryTag boundary = BoundaryTag::dirichlet_at_rmax) const;
  /// Radial derivative u0'(r); tagged even_at_origin_only (no boundary value imposed).
  RadialField sample_gradient(const RadialGrid& grid, const ModelParams& params) const;
};

std::string to_string(Profile::Kind kind);
Profile::Kind profile_kind_from_string(const std::string& name);

/// L with L^{p-1} = (2/(p-1)) (n - 2 - 2/(p-1)), so that L r^{-2/(p-1)} is a
/// stationary solution. Throws when the bracket is not positive.
double singular_steady_state_constant(const ModelParams& params);

// ---- hypothesis checks on initial data --------------------------------------

enum class Verdict { satisfied, violated, undecidable };
std::string to_string(Verdict v);

struct ConditionCheck {
  Verdict verdict = Verdict::undecidable;
  double evidence = 0.0;  ///< measured quantity the verdict was judged on
  std::string measure;    ///< what `evidence` is
  bool satisfied() const { return verdict == Verdict::satisfied; }
};

struct TailFit {
  enum class Kind { negligible, fitted, undecidable };
  Kind kind = Kind::undecidable;
  double exponent = 0.0;  ///< γ in |f| ~ r^{-γ}; +inf when negligible
  int points = 0;
};

/// Least-squares fit of log|f| against log r over the outer quarter of the
/// grid, keeping nodes with |f| > 1e-12.
TailFit fit_tail_exponent(const RadialField& f);

struct HypothesisReport {
  ConditionCheck gradient_lq;         // ∇u0 ∈ L^q, q ∈ [2, n(p-1)/(p+1))
  ConditionCheck gradient_decay;      // |∇u0| = o(r^{-2/(p-1)-1})
  ConditionCheck kernel_limit;        // t-weighted kernel quantities -> 0
  ConditionCheck energy_density_lm;   // |u0|^{p+1} + |∇u0|^2 ∈ L^m
  ConditionCheck profile_decay;       // |u0| + r|∇u0| = o(r^{-2/(p-1)})
};

struct HypothesisOptions {
  double tail_margin = 0.1;
  double trend_threshold = -0.05;
  double t_min = 1.0;
  double t_max = 1e4;
  int t_per_decade = 4;
};

HypothesisReport check_hypotheses(const RadialField& f, const RadialField& grad_f,
                                  const ModelParams& params, const HypothesisOptions& opts = {});

}  // namespace semiheat
