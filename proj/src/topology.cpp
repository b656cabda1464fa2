#include "platoon/topology.hpp"

#include <cmath>
#include <deque>
#include <vector>

#include "platoon/error.hpp"

namespace platoon {

namespace {

bool is_binary(double x) { return x == 0.0 || x == 1.0; }

void validate_adjacency(const Mat& a) {
  if (a.rows() != a.cols()) {
    throw Error(ErrorKind::NonSquare, "adjacency is " + std::to_string(a.rows()) + "x" +
                                          std::to_string(a.cols()));
  }
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (!is_binary(a(i, j))) {
        throw Error(ErrorKind::NonBinaryEntry, "adjacency(" + std::to_string(i) + "," +
                                                   std::to_string(j) + ") is not 0 or 1");
      }
    }
    if (a(i, i) != 0.0) {
      throw Error(ErrorKind::NonzeroDiagonal, "self-loop at follower " + std::to_string(i));
    }
  }
}

void validate_pinning(const Vec& p) {
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (!is_binary(p(i))) {
      throw Error(ErrorKind::NonBinaryEntry, "pinning(" + std::to_string(i) + ") is not 0 or 1");
    }
  }
}

}  // namespace

Mat build_laplacian(const Mat& adjacency) {
  validate_adjacency(adjacency);
  const Eigen::Index n = adjacency.rows();
  Mat l = Mat::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    long degree = 0;  // integer sum keeps rows summing to exactly zero
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i != j && adjacency(i, j) == 1.0) {
        l(i, j) = -1.0;
        ++degree;
      }
    }
    l(i, i) = static_cast<double>(degree);
  }
  return l;
}

Mat build_h(const Mat& laplacian, const Vec& pinning) {
  if (laplacian.rows() != laplacian.cols() || laplacian.rows() != pinning.size()) {
    throw Error(ErrorKind::DimensionMismatch, "laplacian and pinning sizes disagree");
  }
  Mat h = laplacian;
  h.diagonal() += pinning;
  return h;
}

bool has_leader_spanning_tree(const Mat& adjacency, const Vec& pinning) {
  const Eigen::Index n = pinning.size();
  if (adjacency.rows() != n || adjacency.cols() != n) return false;
  std::vector<bool> reached(static_cast<std::size_t>(n), false);
  std::deque<Eigen::Index> frontier;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (pinning(i) != 0.0) {
      reached[static_cast<std::size_t>(i)] = true;
      frontier.push_back(i);
    }
  }
  while (!frontier.empty()) {
    const Eigen::Index j = frontier.front();
    frontier.pop_front();
    // j -> i whenever follower i listens to follower j.
    for (Eigen::Index i = 0; i < n; ++i) {
      if (adjacency(i, j) != 0.0 && !reached[static_cast<std::size_t>(i)]) {
        reached[static_cast<std::size_t>(i)] = true;
        frontier.push_back(i);
      }
    }
  }
  for (bool r : reached) {
    if (!r) return false;
  }
  return n > 0;
}

Mat invert_h(const Mat& h) {
  if (h.rows() != h.cols()) {
    throw Error(ErrorKind::NonSquare, "H must be square");
  }
  const Eigen::Index n = h.rows();
  Mat work = h;
  Mat inv = Mat::Identity(n, n);
  for (Eigen::Index col = 0; col < n; ++col) {
    Eigen::Index pivot = col;
    for (Eigen::Index r = col + 1; r < n; ++r) {
      if (std::abs(work(r, col)) > std::abs(work(pivot, col))) pivot = r;
    }
    if (std::abs(work(pivot, col)) < kSingularPivot) {
      throw Error(ErrorKind::Singular,
                  "pivot below threshold in column " + std::to_string(col) +
                      "; the leader does not reach every follower");
    }
    if (pivot != col) {
      work.row(pivot).swap(work.row(col));
      inv.row(pivot).swap(inv.row(col));
    }
    const double scale = 1.0 / work(col, col);
    work.row(col) *= scale;
    inv.row(col) *= scale;
    for (Eigen::Index r = 0; r < n; ++r) {
      if (r == col) continue;
      const double factor = work(r, col);
      if (factor == 0.0) continue;
      work.row(r) -= factor * work.row(col);
      inv.row(r) -= factor * inv.row(col);
    }
  }
  const double residual = (h * inv - Mat::Identity(n, n)).cwiseAbs().maxCoeff();
  if (!(residual <= 1e-10)) {
    throw Error(ErrorKind::Singular, "inverse residual " + std::to_string(residual) +
                                         " exceeds 1e-10");
  }
  return inv;
}

std::optional<TopologyPreset> parse_topology_preset(std::string_view name) {
  if (name == "bidirectional-leader") return TopologyPreset::BidirectionalLeader;
  if (name == "predecessor-following") return TopologyPreset::PredecessorFollowing;
  if (name == "bidirectional") return TopologyPreset::Bidirectional;
  return std::nullopt;
}

std::string_view to_string(TopologyPreset preset) {
  switch (preset) {
    case TopologyPreset::BidirectionalLeader:
      return "bidirectional-leader";
    case TopologyPreset::PredecessorFollowing:
      return "predecessor-following";
    case TopologyPreset::Bidirectional:
      return "bidirectional";
  }
  return "unknown";
}

Topology::Topology(Mat adjacency, Vec pinning)
    : adjacency_(std::move(adjacency)), pinning_(std::move(pinning)) {
  validate_adjacency(adjacency_);
  validate_pinning(pinning_);
  laplacian_ = build_laplacian(adjacency_);
  h_ = build_h(laplacian_, pinning_);
  symmetric_ = adjacency_ == adjacency_.transpose();
  spanning_tree_ = has_leader_spanning_tree(adjacency_, pinning_);
  try {
    h_inverse_ = invert_h(h_);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Singular) throw;
  }
}

Topology Topology::preset(TopologyPreset preset, int n) {
  if (n < 1) {
    throw Error(ErrorKind::ConfigInvalid, "topology needs at least one follower");
  }
  Mat a = Mat::Zero(n, n);
  Vec p = Vec::Zero(n);
  switch (preset) {
    case TopologyPreset::BidirectionalLeader:
      for (int i = 0; i + 1 < n; ++i) a(i, i + 1) = a(i + 1, i) = 1.0;
      p.setOnes();
      break;
    case TopologyPreset::PredecessorFollowing:
      for (int i = 1; i < n; ++i) a(i, i - 1) = 1.0;
      p(0) = 1.0;
      break;
    case TopologyPreset::Bidirectional:
      for (int i = 0; i + 1 < n; ++i) a(i, i + 1) = a(i + 1, i) = 1.0;
      p(0) = 1.0;
      break;
  }
  return Topology(std::move(a), std::move(p));
}

const Mat& Topology::require_h_inverse() const {
  if (!h_inverse_) {
    throw Error(ErrorKind::Singular, "H = P + L is not invertible for this topology");
  }
  return *h_inverse_;
}

}  // namespace platoon
