#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "svarwb/enumerate.hpp"
#include "svarwb/reduced_form.hpp"

namespace svarwb {

struct SetIdentifiedSample {
  std::vector<OrthogonalBlock> accepted;
  int proposals = 0;
  double acceptance_rate() const {
    return proposals ? static_cast<double>(accepted.size()) / proposals : 0.0;
  }
};

// One rotation drawn column by column from the unit sphere of the null space
// left by the equality restrictions and the earlier columns. Returns false
// when no valid column exists at this draw.
bool propose_rotation(const Admissibility& adm, Rng& rng, OrthogonalBlock& out);

// `proposals` rotations proposed, those satisfying every inequality kept.
SetIdentifiedSample sample_set_identified(const RestrictionProgram& program, const RegimeModel& model,
                                          int proposals, Rng& rng);

enum class DrawStatus { Ok, Empty, NonStationary, Degenerate, SolverBudget };
const char* to_string(DrawStatus s);

struct DrawRecord {
  int index = 0;
  double log_density = 0.0;
  DrawStatus status = DrawStatus::Empty;
  int solutions = 0;  // rotations enumerated or accepted
  int proposals = 0;
  // [p][h] target values: identified-set points or accepted sample values
  std::vector<std::vector<std::vector<double>>> values;
  // [p][m][h] path per distinct regime rotation
  std::vector<std::vector<std::vector<double>>> paths;
  // [p][h] bounds of the identified set at this draw
  std::vector<std::vector<double>> lower, upper;
  // True when values are samples from a connected set described by [lower, upper].
  bool interval_set = false;
  bool admissible() const { return status == DrawStatus::Ok; }
};

// Builds a record from target paths of the admissible rotations at one draw.
DrawRecord make_record(int index, double log_density, const RotationSet& set, const RegimeModel& model,
                       const TargetFunctional& target, const std::vector<int>& horizons, bool distinct_only);

enum class InferenceMode { Auto, LocallyIdentified, SetIdentified };

struct InferenceOptions {
  int posterior_draws = 3000;
  int rotation_draws = 1000;
  int max_proposals = 0;  // 0 means 10 x rotation_draws
  InferenceMode mode = InferenceMode::Auto;
  PriorSpec prior;
  TargetFunctional target;
  std::vector<int> horizons;
  std::uint64_t seed = 0;
  int threads = 1;
  RoutePreference route = RoutePreference::Auto;
  GeneralSolverConfig solver;
};

// Locally identified when f = s n (n - 1) / 2, set identified when f is smaller.
InferenceMode resolve_mode(const RestrictionProgram& program, InferenceMode requested);

std::vector<DrawRecord> collect_draws(const RegimeData& data, const RestrictionProgram& program,
                                      const InferenceOptions& options);
std::vector<DrawRecord> collect_draws(const std::vector<RegimeModel>& models, const std::vector<double>& log_densities,
                                      const RestrictionProgram& program, const InferenceOptions& options);

struct Band {
  double coverage = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

struct BayesCell {
  double mean = 0.0;
  double median = 0.0;
  std::vector<Band> raw;
  std::vector<Band> smoothed;
  int modes = 0;
  std::size_t points = 0;
};

struct BayesPosterior {
  std::vector<int> horizons;
  std::vector<std::vector<BayesCell>> cells;  // [p][h]
  int draws_used = 0;
};

const std::vector<double>& default_coverages();

double weighted_quantile(std::vector<std::pair<double, double>> value_weight, double prob);

// Pools target values over admissible draws; each draw carries total weight one.
BayesPosterior bayes_posterior(const std::vector<DrawRecord>& records, const std::vector<int>& horizons,
                               const std::vector<double>& coverages = default_coverages(), int grid_points = 100);

enum class ProjectionMode { SwitchingLabel, FixedLabel };

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

struct ProjectionCell {
  std::vector<Interval> clusters;
  std::vector<Interval> region;  // union of the cluster intervals
};

struct ProjectionSet {
  int retained = 0;
  int retained_admissible = 0;
  std::vector<std::vector<ProjectionCell>> cells;  // [p][h]
};

std::vector<Interval> merge_intervals(std::vector<Interval> intervals);

ProjectionSet projection_confidence_set(const std::vector<DrawRecord>& records, double alpha, ProjectionMode mode);

struct RobustCell {
  double mean_lower = 0.0;
  double mean_upper = 0.0;
  double center = 0.0;
  double radius = 0.0;
  double region_lower = 0.0;
  double region_upper = 0.0;
  double bayes_mean = 0.0;
};

struct RobustSummary {
  std::vector<std::vector<RobustCell>> cells;  // [p][h]
  int draws_used = 0;
  double nonempty_probability = 0.0;
};

// Smallest radius r(eta) = alpha-quantile over draws of max(|eta - l|, |eta - u|),
// minimized over a 512-point grid and refined by golden-section search.
RobustCell robust_cell(const std::vector<double>& lower, const std::vector<double>& upper, double alpha);

RobustSummary robust_bayes(const std::vector<DrawRecord>& records, double alpha);

struct ProbabilityRange {
  double lower = 0.0;  // share of draws whose identified set lies inside the event
  double upper = 0.0;  // share of draws whose identified set meets the event
};

// Range of posterior probabilities of the event a <= eta <= b in regime p at
// horizon index h, over admissible draws.
ProbabilityRange posterior_probability_range(const std::vector<DrawRecord>& records, int p, int h, double a,
                                             double b);

}  // namespace svarwb
