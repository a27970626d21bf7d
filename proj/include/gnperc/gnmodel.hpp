#pragma once

// The GN(d, alpha) connection rule: weight vectors, connection ranges
// r(x) = sum_i alpha_i d_i(x), graph construction in both variants, and the
// closed-form range oracles.

#include <cstdint>
#include <vector>

#include "gnperc/geometry.hpp"

namespace gnp::model {

// Weight vector alpha: an explicit head alpha_1..alpha_K plus an optional
// geometric tail alpha_i = gamma^i for i > K.
struct AlphaSpec {
  std::vector<double> head;
  bool geometric_tail = false;
  double gamma = 0.0;

  static AlphaSpec zero() { return AlphaSpec{}; }
  // alpha * e_k (the GN_k model).
  static AlphaSpec single(int k, double alpha);
  static AlphaSpec from_head(std::vector<double> head);
  // alpha_i = gamma^i for all i >= 1.
  static AlphaSpec geometric(double gamma);
  // head plus geometric tail continuing gamma^i beyond it.
  static AlphaSpec head_with_geometric(std::vector<double> head, double gamma);

  void validate() const;

  double coeff(int i) const;  // alpha_i, i >= 1
  int head_support() const;   // largest i with head alpha_i != 0 (0 if none)
  bool has_tail() const { return geometric_tail; }

  double total() const;           // |alpha| = sum alpha_i
  double weighted_total() const;  // sum i * alpha_i
  double beta(int k) const;       // sum_{i >= k} alpha_i
};

// Per-point connection ranges computed from the first kmax_used neighbour
// distances; truncation_bound bounds the expected omitted tail per point.
struct RangeField {
  std::vector<double> ranges;
  double truncation_bound = 0.0;
  int kmax_used = 0;
};

RangeField connection_ranges(const geom::NeighborTable& table,
                             const AlphaSpec& alpha);

// E r(x) in one dimension at rate 1: (1/2) sum_i i alpha_i.
double expected_range_1d(const AlphaSpec& alpha);

// E r(x) for interior points in d dimensions at rate lambda:
// sum_i alpha_i Gamma(i + 1/d)/Gamma(i) (lambda c(d))^{-1/d}.
double expected_range(const AlphaSpec& alpha, int d, double lambda);

// Expected omitted tail sum_{i > kmax} alpha_i E[d_i].
double truncation_bound(const AlphaSpec& alpha, int d, double lambda, int kmax);

// Smallest usable kNN depth: covers the head support, and for geometric
// tails pushes the truncation bound below rel_tol * E r(x).
int required_kmax(const AlphaSpec& alpha, int d, double lambda,
                  double rel_tol = 1e-3);

// Laplace transform of V = sum_i beta_i U_i with U_i iid Exp(2):
// phi_V(s) = prod_i 1/(1 + beta_i s / 2).
double laplace_V(const AlphaSpec& alpha, double s);

enum class RangeClass { kFiniteRange, kInfiniteRange, kUndecidable };

// r(x) = infinity a.s. iff sum_i i^{1/d} alpha_i = infinity. Head + geometric
// specs always converge; the power-law overload classifies alpha_i = c i^{-p}.
RangeClass divergence_classifier(const AlphaSpec& alpha, int d);
RangeClass divergence_classifier_powerlaw(double c, double p, int d);

enum class Variant { kReachUnion, kBooleanOverlap };

// Directed reach relation x -> y iff |x-y| <= r(x), plus the undirected
// closure of the chosen variant: reach-union joins {x,y} iff either reaches
// the other; boolean-overlap iff |x-y| <= r(x) + r(y).
struct GNGraph {
  std::size_t n = 0;
  Variant variant = Variant::kReachUnion;
  std::vector<std::vector<std::uint32_t>> reach;
  std::vector<std::vector<std::uint32_t>> undirected;

  std::size_t undirected_edge_count() const;
  // Unordered edge list with u < v, sorted.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edge_list() const;
};

GNGraph build_graph(const geom::PointSet& points, const RangeField& ranges,
                    Variant variant, std::size_t threads = 0);

// Independent k-nearest-neighbour graph (no RangeField): brute-force
// all-pairs, so it can serve as an oracle for GN_k(d,1).
GNGraph nn_reference_graph(const geom::PointSet& points, int k);

}  // namespace gnp::model
