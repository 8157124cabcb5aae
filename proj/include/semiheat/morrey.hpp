#pragma once

#include <vector>

#include "semiheat/model.hpp"

namespace semiheat {

/// Selects the Morrey norm sup_{a,R} (R^{λ-n} ∫_{B_R(a)} |f|^q)^{1/q}.
struct MorreySpec {
  double q = 2.0;
  double lambda = 0.0;

  /// Throws unless 1 <= q and 0 <= lambda <= n.
  void validate(int n) const;
  /// The scaling-critical pairing λ = 2q/(p-1).
  static MorreySpec critical(double q, const ModelParams& params);
};

/// Finite set of ball centers and radii replacing the sup over a and R.
struct MorreyLattice {
  std::vector<double> centers;
  std::vector<double> radii;

  /// centers {0} plus 32 log-spaced points in [h, R_max]; 48 log-spaced radii in [h, 2 R_max].
  static MorreyLattice default_for(const RadialGrid& grid);
  /// Inserts the geometric midpoint between neighbouring entries. Superset of *this.
  MorreyLattice refined() const;
};

struct MorreyOptions {
  /// Continue from the best lattice cell with a local pattern search in (log a, log R).
  bool polish = false;
};

struct MorreyResult {
  double value = 0.0;
  double a = 0.0;  ///< maximizing center (0 for λ = n)
  double R = 0.0;  ///< maximizing radius (0 for λ = n)
  bool truncated = false;
};

struct MorreyCell {
  double a;
  double R;
  double value;  ///< R^{λ-n} ∫_{B_R(a)} |f|^q
};

MorreyResult morrey_norm_detail(const RadialField& f, const MorreySpec& spec,
                                const MorreyLattice& lattice, const MorreyOptions& opts = {});
double morrey_norm(const RadialField& f, const MorreySpec& spec, const MorreyLattice& lattice,
                   const MorreyOptions& opts = {});
/// Uses MorreyLattice::default_for(f.grid()).
double morrey_norm(const RadialField& f, const MorreySpec& spec);

/// Every lattice cell, center-major.
std::vector<MorreyCell> morrey_cells(const RadialField& f, const MorreySpec& spec,
                                     const MorreyLattice& lattice);

/// Largest maximand over the `count` smallest radii; its trend as R -> 0 is
/// the vanishing-small-scale diagnostic.
double small_scale_maximand(const RadialField& f, const MorreySpec& spec,
                            const MorreyLattice& lattice, int count = 4);

/// max over t of t^{λ/2} sup_a (G_t * |f|^q)(a), sup over the lattice centers.
double kernel_majorant(const RadialField& f, const MorreySpec& spec, const std::vector<double>& t_grid,
                       const MorreyLattice& lattice);

/// Lebesgue exponent in [1, ∞], with ∞ as a distinct state.
class Exponent {
 public:
  explicit Exponent(double q);
  static Exponent infinity();
  bool is_infinite() const { return infinite_; }
  double value() const;  ///< throws for ∞
  double reciprocal() const { return infinite_ ? 0.0 : 1.0 / q_; }

 private:
  Exponent() = default;
  double q_ = 1.0;
  bool infinite_ = false;
};

/// ‖f‖_{M^{q,λ}}; for q = ∞ this is sup_norm(f).
double morrey_norm(const RadialField& f, Exponent q, double lambda, const MorreyLattice& lattice);

struct SmoothingPoint {
  double t;
  double smoothed;     ///< ‖G_t f‖ in M^{to_q,λ}; for to_q = ∞ the sup of |G_t f| over the lattice centers
  double bound;        ///< t^{-(λ/2)(1/from_q - 1/to_q)} ‖f‖ in M^{from_q,λ}
  double ratio;        ///< smoothed / bound
  double contraction;  ///< ‖G_t f‖ / ‖f‖, both in M^{from_q,λ}
};

std::vector<SmoothingPoint> smoothing_profile(const RadialField& f, Exponent from_q, Exponent to_q,
                                              double lambda, const std::vector<double>& t_grid,
                                              const MorreyLattice& lattice);

}  // namespace semiheat
