#include "odscale/network.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>
#include <utility>

#include "odscale/error.hpp"

namespace odscale {

AssignmentMatrix::AssignmentMatrix(std::vector<std::vector<Entry>> columns) : columns_(std::move(columns)) {
  for (const auto& column : columns_) nonzeros_ += column.size();
}

double AssignmentMatrix::at(std::size_t segment, std::size_t od) const {
  for (const auto& entry : columns_.at(od)) {
    if (entry.segment == segment) return entry.probability;
  }
  return 0.0;
}

namespace {

template <typename T>
std::unordered_map<std::string, std::size_t> index_by_id(const std::vector<T>& items, const char* what) {
  std::unordered_map<std::string, std::size_t> lookup;
  lookup.reserve(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i].id.empty()) throw Error(ErrorCode::MissingReference, std::string("empty ") + what + " id");
    if (!lookup.emplace(items[i].id, i).second) {
      throw Error(ErrorCode::DuplicateId, std::string(what) + " '" + items[i].id + "'");
    }
  }
  return lookup;
}

void validate_segment(const Segment& s) {
  auto bad = [&](const std::string& rule) {
    throw Error(ErrorCode::InvalidSegment, "segment '" + s.id + "' violates " + rule);
  };
  if (!(std::isfinite(s.length_km) && s.length_km > 0.0)) bad("length_km > 0");
  if (s.lanes < 1) bad("lanes >= 1");
  if (!(std::isfinite(s.v_min_kmh) && s.v_min_kmh > 0.0)) bad("v_min_kmh > 0");
  if (!(std::isfinite(s.v_max_kmh) && s.v_min_kmh < s.v_max_kmh)) bad("v_min_kmh < v_max_kmh");
}

}  // namespace

std::optional<std::size_t> NetworkSnapshot::segment_index(const std::string& id) const {
  auto it = segment_lookup_.find(id);
  if (it == segment_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> NetworkSnapshot::path_index(const std::string& id) const {
  auto it = path_lookup_.find(id);
  if (it == path_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> NetworkSnapshot::od_index(const std::string& id) const {
  auto it = od_lookup_.find(id);
  if (it == od_lookup_.end()) return std::nullopt;
  return it->second;
}

const Segment& NetworkSnapshot::segment(const std::string& id) const {
  auto index = segment_index(id);
  if (!index) throw Error(ErrorCode::MissingReference, "segment '" + id + "'");
  return segments_[*index];
}

const Path& NetworkSnapshot::path(const std::string& id) const {
  auto index = path_index(id);
  if (!index) throw Error(ErrorCode::MissingReference, "path '" + id + "'");
  return paths_[*index];
}

NetworkSnapshot build_snapshot(std::vector<Segment> segments, std::vector<Path> paths,
                               std::vector<OdPair> od_pairs,
                               std::optional<std::vector<AssignmentEntry>> assignment_override) {
  NetworkSnapshot net;
  net.segment_lookup_ = index_by_id(segments, "segment");
  net.path_lookup_ = index_by_id(paths, "path");
  net.od_lookup_ = index_by_id(od_pairs, "od");

  for (const auto& s : segments) validate_segment(s);

  net.path_segments_.reserve(paths.size());
  for (const auto& p : paths) {
    if (p.segment_ids.empty()) throw Error(ErrorCode::MissingReference, "path '" + p.id + "' has no segments");
    std::vector<std::size_t> indices;
    indices.reserve(p.segment_ids.size());
    std::unordered_set<std::size_t> seen;
    for (const auto& sid : p.segment_ids) {
      auto it = net.segment_lookup_.find(sid);
      if (it == net.segment_lookup_.end()) {
        throw Error(ErrorCode::MissingReference, "path '" + p.id + "' references unknown segment '" + sid + "'");
      }
      if (!seen.insert(it->second).second) {
        throw Error(ErrorCode::DuplicateId, "path '" + p.id + "' repeats segment '" + sid + "'");
      }
      indices.push_back(it->second);
    }
    net.path_segments_.push_back(std::move(indices));
  }

  net.od_path_.reserve(od_pairs.size());
  for (const auto& od : od_pairs) {
    auto it = net.path_lookup_.find(od.path_id);
    if (it == net.path_lookup_.end()) {
      throw Error(ErrorCode::MissingReference, "od '" + od.id + "' references unknown path '" + od.path_id + "'");
    }
    if (!(std::isfinite(od.subsample_demand_vph) && od.subsample_demand_vph >= 0.0)) {
      throw Error(ErrorCode::NegativeDemand, "od '" + od.id + "'");
    }
    net.od_path_.push_back(it->second);
  }

  std::vector<std::vector<AssignmentMatrix::Entry>> columns(od_pairs.size());
  if (assignment_override) {
    for (const auto& e : *assignment_override) {
      auto seg = net.segment_lookup_.find(e.segment_id);
      if (seg == net.segment_lookup_.end()) {
        throw Error(ErrorCode::MissingReference, "assignment references unknown segment '" + e.segment_id + "'");
      }
      auto od = net.od_lookup_.find(e.od_id);
      if (od == net.od_lookup_.end()) {
        throw Error(ErrorCode::MissingReference, "assignment references unknown od '" + e.od_id + "'");
      }
      if (!(e.probability >= 0.0 && e.probability <= 1.0)) {
        throw Error(ErrorCode::InvalidProbability,
                    "assignment (" + e.segment_id + ", " + e.od_id + ") outside [0, 1]");
      }
      auto& column = columns[od->second];
      auto dup = std::find_if(column.begin(), column.end(), [&](const auto& x) { return x.segment == seg->second; });
      if (dup != column.end()) {
        throw Error(ErrorCode::DuplicateId, "assignment (" + e.segment_id + ", " + e.od_id + ") given twice");
      }
      if (e.probability > 0.0) column.push_back({seg->second, e.probability});
    }
  } else {
    for (std::size_t j = 0; j < od_pairs.size(); ++j) {
      for (std::size_t seg : net.path_segments_[net.od_path_[j]]) columns[j].push_back({seg, 1.0});
    }
  }
  net.assignment_ = AssignmentMatrix(std::move(columns));

  net.segments_ = std::move(segments);
  net.paths_ = std::move(paths);
  net.od_pairs_ = std::move(od_pairs);
  return net;
}

std::vector<double> segment_demand_coefficients(const NetworkSnapshot& snapshot) {
  std::vector<double> coefficients(snapshot.segments().size(), 0.0);
  const auto& ods = snapshot.od_pairs();
  for (std::size_t j = 0; j < ods.size(); ++j) {
    const double demand = ods[j].subsample_demand_vph;
    for (const auto& entry : snapshot.assignment().column(j)) {
      coefficients[entry.segment] += entry.probability * demand;
    }
  }
  return coefficients;
}

}  // namespace odscale
