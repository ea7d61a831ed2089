#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace odscale {

/// Directed highway segment. Lengths in km, speeds in km/h.
struct Segment {
  std::string id;
  double length_km = 0.0;
  int lanes = 0;
  double v_max_kmh = 0.0;
  double v_min_kmh = 0.0;

  friend bool operator==(const Segment&, const Segment&) = default;
};

/// Ramp-to-ramp route, as an ordered list of segment ids.
struct Path {
  std::string id;
  std::vector<std::string> segment_ids;

  friend bool operator==(const Path&, const Path&) = default;
};

/// One on-ramp/off-ramp pair with its single route and subsample demand (veh/h).
struct OdPair {
  std::string id;
  std::string path_id;
  double subsample_demand_vph = 0.0;

  friend bool operator==(const OdPair&, const OdPair&) = default;
};

/// Explicit assignment probability, used to override the path-derived 0/1 entries.
struct AssignmentEntry {
  std::string segment_id;
  std::string od_id;
  double probability = 0.0;

  friend bool operator==(const AssignmentEntry&, const AssignmentEntry&) = default;
};

/// Sparse assignment matrix stored column-wise: for each OD (by index), the
/// segments it loads and with which probability.
class AssignmentMatrix {
public:
  struct Entry {
    std::size_t segment;
    double probability;
  };

  AssignmentMatrix() = default;
  explicit AssignmentMatrix(std::vector<std::vector<Entry>> columns);

  std::span<const Entry> column(std::size_t od) const { return columns_[od]; }
  std::size_t od_count() const noexcept { return columns_.size(); }
  std::size_t nonzero_count() const noexcept { return nonzeros_; }

  /// Probability for (segment, od); 0 when absent.
  double at(std::size_t segment, std::size_t od) const;

private:
  std::vector<std::vector<Entry>> columns_;
  std::size_t nonzeros_ = 0;
};

/// Validated, immutable network: segments, paths, OD pairs and their
/// assignment matrix. Elements keep their input order; lookups by id go
/// through the index accessors.
class NetworkSnapshot {
public:
  const std::vector<Segment>& segments() const noexcept { return segments_; }
  const std::vector<Path>& paths() const noexcept { return paths_; }
  const std::vector<OdPair>& od_pairs() const noexcept { return od_pairs_; }
  const AssignmentMatrix& assignment() const noexcept { return assignment_; }

  /// Segment indices of each path, in travel order.
  std::span<const std::size_t> path_segments(std::size_t path) const { return path_segments_[path]; }
  std::size_t od_path(std::size_t od) const { return od_path_[od]; }

  std::optional<std::size_t> segment_index(const std::string& id) const;
  std::optional<std::size_t> path_index(const std::string& id) const;
  std::optional<std::size_t> od_index(const std::string& id) const;

  const Segment& segment(const std::string& id) const;
  const Path& path(const std::string& id) const;

private:
  friend NetworkSnapshot build_snapshot(std::vector<Segment>, std::vector<Path>,
                                        std::vector<OdPair>,
                                        std::optional<std::vector<AssignmentEntry>>);

  std::vector<Segment> segments_;
  std::vector<Path> paths_;
  std::vector<OdPair> od_pairs_;
  AssignmentMatrix assignment_;
  std::vector<std::vector<std::size_t>> path_segments_;
  std::vector<std::size_t> od_path_;
  std::unordered_map<std::string, std::size_t> segment_lookup_;
  std::unordered_map<std::string, std::size_t> path_lookup_;
  std::unordered_map<std::string, std::size_t> od_lookup_;
};

/// Validates the raw collections and derives the assignment matrix. Without
/// an override every segment of an OD's path gets probability 1; with one,
/// the given entries replace the derived matrix entirely.
///
/// Throws Error with MissingReference, DuplicateId, InvalidSegment,
/// NegativeDemand or InvalidProbability.
NetworkSnapshot build_snapshot(std::vector<Segment> segments, std::vector<Path> paths,
                               std::vector<OdPair> od_pairs,
                               std::optional<std::vector<AssignmentEntry>> assignment_override = std::nullopt);

/// c_i = sum_j a_ij d_j, indexed like snapshot.segments(). Segment demand at
/// scaling factor x is x * c_i.
std::vector<double> segment_demand_coefficients(const NetworkSnapshot& snapshot);

}  // namespace odscale
