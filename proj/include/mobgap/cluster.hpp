#pragma once

#include "mobgap/schema.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace mobgap {

struct ClusterConfig {
    std::size_t k = 1;
    // Categorical mismatch weight; nullopt selects auto_gamma().
    std::optional<double> gamma;
    std::size_t max_iter = 100;
    std::size_t n_restarts = 10;
    std::uint64_t seed = 0;
    bool standardize_numeric = true;
};

// z-transform recorded per numeric column. stddev == 0 marks a constant
// column: only the mean shift was applied.
struct ColumnStandardization {
    double mean = 0.0;
    double stddev = 1.0;
};

// Fitted K-prototypes model. Prototypes live in the space the fit ran in
// (z-scored when standardization was on); `standardization` maps back.
struct ClusterModel {
    std::size_t k = 0;
    std::vector<FeatureVector> prototypes; // numeric parts are means, categorical parts modes
    double gamma_used = 0.0;
    std::vector<std::size_t> assignments;
    double cost = 0.0; // total dispersion, sum of point-to-prototype dissimilarities
    std::size_t iterations_run = 0;
    bool converged = true;
    std::vector<ColumnStandardization> standardization; // empty when standardization was off
    std::vector<double> cost_history; // cost after each (assign, update) pair of the winning restart

    // Prototype with numeric components mapped back to input units.
    FeatureVector prototype_in_input_units(std::size_t cluster) const;
};

struct DispersionPoint {
    std::size_t k = 0;
    double average_dispersion = 0.0;
};

struct DispersionCurve {
    std::vector<DispersionPoint> points; // strictly increasing consecutive k
};

// Per-iteration record of a single Lloyd run, for convergence diagnostics and
// reference-implementation comparisons.
struct FitTrace {
    std::vector<double> costs;
    std::vector<std::vector<std::size_t>> assignments;
};

// Mixed dissimilarity: squared Euclidean over numeric columns plus gamma
// times the count of categorical mismatches. Symmetric,
// non-negative, zero iff the vectors are equal (for gamma > 0 or all-numeric
// schemas). Validates both vectors against the schema.
double mixed_dissimilarity(const FeatureVector& x, const FeatureVector& q, double gamma,
                           const FeatureSchema& schema);

// Nearest-prototype index per point; ties break toward the lowest prototype
// index. Throws ValidationError on an empty prototype list.
std::vector<std::size_t> assign(const std::vector<FeatureVector>& points,
                                const std::vector<FeatureVector>& prototypes, double gamma,
                                const FeatureSchema& schema);

// Per-cluster numeric means and categorical modes; mode ties break toward the
// lowest category index. Throws EmptyClusterError when any cluster in
// [0, cluster_count) has no members.
std::vector<FeatureVector> update_prototypes(const std::vector<FeatureVector>& points,
                                             const std::vector<std::size_t>& assignments,
                                             std::size_t cluster_count, const FeatureSchema& schema);

// Default categorical weight: 0.5 times the mean per-numeric-column
// population standard deviation (1.0 when the schema has no numeric columns,
// which degrades the dissimilarity to K-modes weighting).
double auto_gamma(const std::vector<FeatureVector>& points, const FeatureSchema& schema);

// k distinct records sampled uniformly without replacement; deterministic
// for a fixed seed. Throws InfeasibleError when fewer than k distinct points
// exist.
std::vector<std::size_t> select_initial_prototypes(const std::vector<FeatureVector>& points,
                                                   std::size_t k, std::uint64_t seed);

// One Lloyd run from the given initial records, no standardization, no
// restarts. Empty clusters are repaired by reseeding with the point farthest
// from its assigned prototype. Exposed for reference-algorithm comparisons.
ClusterModel fit_single(const std::vector<FeatureVector>& points, const FeatureSchema& schema,
                        std::size_t k, double gamma, const std::vector<std::size_t>& initial_indices,
                        std::size_t max_iter, FitTrace* trace = nullptr);

// Full fit: optional z-scoring, gamma resolution, seeded restarts, best cost
// wins with ties toward the lower restart index. Deterministic for fixed
// (points order, config) regardless of `threads`.
ClusterModel fit(const std::vector<FeatureVector>& points, const ClusterConfig& config,
                 const FeatureSchema& schema, unsigned threads = 1);

// model.cost / n_points.
double average_dispersion(const ClusterModel& model, std::size_t n_points);

// Fits every k in [k_min, k_max], seeding each fit from the template seed and
// k, and records average dispersion per k.
DispersionCurve sweep_k(const std::vector<FeatureVector>& points, std::size_t k_min, std::size_t k_max,
                        const ClusterConfig& config_template, const FeatureSchema& schema,
                        unsigned threads = 1);

// Smallest k whose relative dispersion drop to k+1 falls below tau; the
// curve's largest k when every drop stays at or above tau. A zero dispersion
// counts as a zero drop.
std::size_t select_elbow(const DispersionCurve& curve, double tau);

// Model document I/O. record_ids (one per assignment, e.g. household ids)
// guard downstream stages against misaligned inputs.
struct ModelDocument {
    ClusterModel model;
    FeatureSchema schema;
    std::vector<std::string> record_ids;
};

std::string model_to_json(const ClusterModel& model, const FeatureSchema& schema,
                          const std::vector<std::string>& record_ids);
ModelDocument model_from_json(const std::string& text);
void write_model_json(const std::filesystem::path& path, const ClusterModel& model,
                      const FeatureSchema& schema, const std::vector<std::string>& record_ids);
ModelDocument read_model_json(const std::filesystem::path& path);

} // namespace mobgap
