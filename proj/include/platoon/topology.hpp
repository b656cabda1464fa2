#pragma once

// Information-flow topology of a platoon: adjacency, pinning to the leader,
// the graph Laplacian and the coupling matrix H = P + L.

#include <optional>
#include <string>
#include <string_view>

#include "platoon/types.hpp"

namespace platoon {

/// Pivot magnitude below which H is treated as singular.
inline constexpr double kSingularPivot = 1e-12;

/// L[i][j] = -A[i][j] off the diagonal, L[i][i] = row degree.
/// Throws NonSquare, NonBinaryEntry or NonzeroDiagonal.
Mat build_laplacian(const Mat& adjacency);

/// H = diag(pinning) + L. Throws DimensionMismatch.
Mat build_h(const Mat& laplacian, const Vec& pinning);

/// True iff every follower is reachable from the leader (node 0) in the
/// augmented graph with edges j -> i for A[i][j] = 1 and 0 -> i for P[i] = 1.
bool has_leader_spanning_tree(const Mat& adjacency, const Vec& pinning);

/// Gauss-Jordan inversion with partial pivoting. Throws Singular when a pivot
/// falls below kSingularPivot or the residual max|H*Hinv - I| exceeds 1e-10.
Mat invert_h(const Mat& h);

enum class TopologyPreset { BidirectionalLeader, PredecessorFollowing, Bidirectional };

std::optional<TopologyPreset> parse_topology_preset(std::string_view name);
std::string_view to_string(TopologyPreset preset);

/// Immutable once built; safe to share between concurrent runs.
class Topology {
 public:
  /// Validates the adjacency and derives L, H and (when it exists) H^-1.
  Topology(Mat adjacency, Vec pinning);

  static Topology preset(TopologyPreset preset, int n);

  int n() const { return static_cast<int>(pinning_.size()); }
  const Mat& adjacency() const { return adjacency_; }
  const Vec& pinning() const { return pinning_; }
  const Mat& laplacian() const { return laplacian_; }
  const Mat& h() const { return h_; }
  const std::optional<Mat>& h_inverse() const { return h_inverse_; }

  /// H^-1, or throws Singular when H could not be inverted.
  const Mat& require_h_inverse() const;

  bool symmetric() const { return symmetric_; }
  bool leader_spanning_tree() const { return spanning_tree_; }

 private:
  Mat adjacency_;
  Vec pinning_;
  Mat laplacian_;
  Mat h_;
  std::optional<Mat> h_inverse_;
  bool symmetric_ = true;
  bool spanning_tree_ = false;
};

}  // namespace platoon
