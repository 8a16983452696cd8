#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "grouptc/action.hpp"
#include "grouptc/train.hpp"

namespace gtc {

/// Smallest h with max_u |theta2(u) - (L_h theta1)(u)| <= tol, if any.
std::optional<int> same_orbit(std::span<const double> theta1, std::span<const double> theta2,
                              const PermutationAction& action, double tol = 1e-9);

struct Alignment {
  int element = 0;
  double distance = 0.0;  // ||L_h x - target|| / ||target||
};

/// Best translate of x toward target over every group element.
Alignment aligned_distance(std::span<const double> target, std::span<const double> x, const PermutationAction& action);

enum class ScanFilter { All, NonzeroFourier };

std::string scan_filter_name(ScanFilter f);
ScanFilter parse_scan_filter(const std::string& text);

struct CollisionReport {
  std::string group;
  std::vector<int> values;
  ScanFilter filter = ScanFilter::All;
  std::uint64_t signals = 0;       // signals that passed the filter
  std::uint64_t fingerprints = 0;  // distinct TC fingerprints
  std::uint64_t equal_tc_pairs = 0;
  std::uint64_t same_orbit_pairs = 0;
  std::uint64_t cross_orbit_pairs = 0;
  std::uint64_t cross_orbit_both_singular = 0;  // cross-orbit pairs whose members both have a singular block
  std::vector<std::pair<std::vector<int>, std::vector<int>>> witnesses;  // first cross-orbit pairs
};

constexpr std::uint64_t kMaxScanSignals = 10'000'000;

/// Enumerates every signal with entries from `values`, groups them by exact
/// integer TC and classifies each equal-TC pair with the orbit oracle.
CollisionReport completeness_scan(const GroupPtr& group, const std::vector<int>& values, ScanFilter filter,
                                  int threads = 1, std::size_t max_witnesses = 16);

std::string collision_report_to_csv(const CollisionReport& report);

struct MetamerOptions {
  int restarts = 20;
  int steps = 30000;  // upper bound; stalled restarts stop early
  std::uint64_t seed = 0;
  double lr = 5e-3;  // 100x the default training rate
  double min_lr = 1e-6;
  int window = 50;            // steps per scheduler update
  double convergence = 1e-4;  // normalised representation distance
  double orbit_tolerance = 1e-2;
  bool start_at_target = false;
};

/// Desk-scale settings: 100x the desk training rate.
MetamerOptions desk_metamer_options();

struct MetamerRestart {
  int restart = 0;
  double representation_distance = 0.0;
  double orbit_distance = 0.0;
  int best_element = 0;
  bool converged = false;
  bool in_orbit = false;
  int label = 0;
  std::vector<double> input;
};

struct MetamerReport {
  int target_id = 0;
  int target_label = 0;
  std::vector<MetamerRestart> restarts;

  int converged() const;
  /// Converged restarts outside the target's orbit.
  int metamers() const;
};

/// Optimises random inputs so their eval-mode MLP input matches the target's.
MetamerReport metamer_search(const Model& model, std::span<const double> target, int target_id,
                             const MetamerOptions& options, int threads = 1);

std::string metamer_reports_to_csv(const std::vector<MetamerReport>& reports);

}  // namespace gtc
