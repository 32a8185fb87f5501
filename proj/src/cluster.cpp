#include "mobgap/cluster.hpp"

#include "mobgap/errors.hpp"
#include "mobgap/util.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_set>

namespace mobgap {

namespace {

double dissimilarity_unchecked(const FeatureVector& x, const FeatureVector& q, double gamma) {
    double d = 0.0;
    for (std::size_t j = 0; j < x.numeric.size(); ++j) {
        const double diff = x.numeric[j] - q.numeric[j];
        d += diff * diff;
    }
    int mismatches = 0;
    for (std::size_t j = 0; j < x.categorical.size(); ++j) {
        mismatches += (x.categorical[j] != q.categorical[j]) ? 1 : 0;
    }
    return d + gamma * mismatches;
}

std::vector<std::size_t> assign_unchecked(const std::vector<FeatureVector>& points,
                                          const std::vector<FeatureVector>& prototypes, double gamma) {
    std::vector<std::size_t> out(points.size(), 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
        double best = dissimilarity_unchecked(points[i], prototypes[0], gamma);
        std::size_t best_c = 0;
        for (std::size_t c = 1; c < prototypes.size(); ++c) {
            const double d = dissimilarity_unchecked(points[i], prototypes[c], gamma);
            if (d < best) {
                best = d;
                best_c = c;
            }
        }
        out[i] = best_c;
    }
    return out;
}

std::vector<FeatureVector> update_unchecked(const std::vector<FeatureVector>& points,
                                            const std::vector<std::size_t>& assignments,
                                            std::size_t cluster_count, const FeatureSchema& schema) {
    const std::size_t n_num = schema.numeric_count();
    const std::size_t n_cat = schema.categorical_count();

    std::vector<std::size_t> sizes(cluster_count, 0);
    std::vector<std::vector<double>> sums(cluster_count, std::vector<double>(n_num, 0.0));
    std::vector<std::vector<std::vector<std::size_t>>> counts(cluster_count);
    for (std::size_t c = 0; c < cluster_count; ++c) {
        counts[c].resize(n_cat);
        for (std::size_t j = 0; j < n_cat; ++j) {
            counts[c][j].assign(schema.categorical_column(j).categories.size(), 0);
        }
    }

    for (std::size_t i = 0; i < points.size(); ++i) {
        const std::size_t c = assignments[i];
        ++sizes[c];
        for (std::size_t j = 0; j < n_num; ++j) {
            sums[c][j] += points[i].numeric[j];
        }
        for (std::size_t j = 0; j < n_cat; ++j) {
            ++counts[c][j][static_cast<std::size_t>(points[i].categorical[j])];
        }
    }

    std::vector<FeatureVector> prototypes(cluster_count);
    for (std::size_t c = 0; c < cluster_count; ++c) {
        if (sizes[c] == 0) {
            throw EmptyClusterError("cluster " + std::to_string(c) + " has no members");
        }
        prototypes[c].numeric.resize(n_num);
        for (std::size_t j = 0; j < n_num; ++j) {
            prototypes[c].numeric[j] = sums[c][j] / static_cast<double>(sizes[c]);
        }
        prototypes[c].categorical.resize(n_cat);
        for (std::size_t j = 0; j < n_cat; ++j) {
            const auto& cnt = counts[c][j];
            std::size_t mode = 0;
            for (std::size_t l = 1; l < cnt.size(); ++l) {
                if (cnt[l] > cnt[mode]) {
                    mode = l; // strict > keeps the lowest index on ties
                }
            }
            prototypes[c].categorical[j] = static_cast<std::int32_t>(mode);
        }
    }
    return prototypes;
}

double total_cost(const std::vector<FeatureVector>& points, const std::vector<FeatureVector>& prototypes,
                  const std::vector<std::size_t>& assignments, double gamma) {
    double cost = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        cost += dissimilarity_unchecked(points[i], prototypes[assignments[i]], gamma);
    }
    return cost;
}

// Moves the worst-fit point (largest dissimilarity to its assigned prototype,
// skipping singleton clusters, ties to the lowest point index) into each empty
// cluster and makes it that cluster's prototype.
void repair_empty_clusters(const std::vector<FeatureVector>& points, std::vector<FeatureVector>& prototypes,
                           std::vector<std::size_t>& assignments, double gamma) {
    const std::size_t k = prototypes.size();
    std::vector<std::size_t> sizes(k, 0);
    for (const std::size_t a : assignments) {
        ++sizes[a];
    }
    for (std::size_t c = 0; c < k; ++c) {
        if (sizes[c] != 0) {
            continue;
        }
        double worst = -1.0;
        std::size_t donor = points.size();
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (sizes[assignments[i]] <= 1) {
                continue;
            }
            const double d = dissimilarity_unchecked(points[i], prototypes[assignments[i]], gamma);
            if (d > worst) {
                worst = d;
                donor = i;
            }
        }
        if (donor == points.size()) {
            throw ComputationError("cannot repair empty cluster: no donor point available");
        }
        --sizes[assignments[donor]];
        prototypes[c] = points[donor];
        assignments[donor] = c;
        sizes[c] = 1;
    }
}

std::size_t count_distinct(const std::vector<FeatureVector>& points, std::size_t stop_at) {
    std::unordered_set<FeatureVector, FeatureVectorHash> seen;
    for (const auto& p : points) {
        seen.insert(p);
        if (seen.size() >= stop_at) {
            break;
        }
    }
    return seen.size();
}

std::vector<ColumnStandardization> numeric_moments(const std::vector<FeatureVector>& points,
                                                   std::size_t n_num) {
    std::vector<ColumnStandardization> out(n_num);
    const double n = static_cast<double>(points.size());
    for (std::size_t j = 0; j < n_num; ++j) {
        double sum = 0.0;
        for (const auto& p : points) {
            sum += p.numeric[j];
        }
        const double mean = sum / n;
        double ss = 0.0;
        for (const auto& p : points) {
            const double d = p.numeric[j] - mean;
            ss += d * d;
        }
        out[j].mean = mean;
        out[j].stddev = std::sqrt(ss / n); // population convention
    }
    return out;
}

} // namespace

double mixed_dissimilarity(const FeatureVector& x, const FeatureVector& q, double gamma,
                           const FeatureSchema& schema) {
    if (gamma < 0.0) {
        throw ValidationError("gamma must be non-negative");
    }
    schema.validate(x);
    schema.validate(q);
    return dissimilarity_unchecked(x, q, gamma);
}

std::vector<std::size_t> assign(const std::vector<FeatureVector>& points,
                                const std::vector<FeatureVector>& prototypes, double gamma,
                                const FeatureSchema& schema) {
    if (prototypes.empty()) {
        throw ValidationError("assign needs at least one prototype");
    }
    for (const auto& p : points) {
        schema.validate(p);
    }
    for (const auto& q : prototypes) {
        schema.validate(q);
    }
    return assign_unchecked(points, prototypes, gamma);
}

std::vector<FeatureVector> update_prototypes(const std::vector<FeatureVector>& points,
                                             const std::vector<std::size_t>& assignments,
                                             std::size_t cluster_count, const FeatureSchema& schema) {
    if (points.size() != assignments.size()) {
        throw ValidationError("assignments length does not match point count");
    }
    for (const std::size_t a : assignments) {
        if (a >= cluster_count) {
            throw ValidationError("assignment index " + std::to_string(a) + " out of range");
        }
    }
    for (const auto& p : points) {
        schema.validate(p);
    }
    return update_unchecked(points, assignments, cluster_count, schema);
}

double auto_gamma(const std::vector<FeatureVector>& points, const FeatureSchema& schema) {
    if (schema.numeric_count() == 0) {
        return 1.0;
    }
    if (points.empty()) {
        throw ValidationError("auto_gamma needs at least one point");
    }
    const auto moments = numeric_moments(points, schema.numeric_count());
    double sum = 0.0;
    for (const auto& m : moments) {
        sum += m.stddev;
    }
    return 0.5 * sum / static_cast<double>(moments.size());
}

std::vector<std::size_t> select_initial_prototypes(const std::vector<FeatureVector>& points,
                                                   std::size_t k, std::uint64_t seed) {
    const std::size_t n = points.size();
    Rng rng(seed);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) {
        order[i] = i;
    }
    std::vector<std::size_t> chosen;
    std::unordered_set<FeatureVector, FeatureVectorHash> seen;
    // Partial Fisher-Yates, skipping records equal to an already chosen one.
    for (std::size_t i = 0; i < n && chosen.size() < k; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.bounded(n - i));
        std::swap(order[i], order[j]);
        if (seen.insert(points[order[i]]).second) {
            chosen.push_back(order[i]);
        }
    }
    if (chosen.size() < k) {
        throw InfeasibleError("requested " + std::to_string(k) + " clusters but only " +
                              std::to_string(chosen.size()) + " distinct points exist");
    }
    return chosen;
}

ClusterModel fit_single(const std::vector<FeatureVector>& points, const FeatureSchema& schema,
                        std::size_t k, double gamma, const std::vector<std::size_t>& initial_indices,
                        std::size_t max_iter, FitTrace* trace) {
    if (k == 0) {
        throw ValidationError("cluster count must be at least 1");
    }
    if (initial_indices.size() != k) {
        throw ValidationError("initial index count does not match k");
    }
    if (max_iter == 0) {
        throw ValidationError("max_iter must be at least 1");
    }

    std::vector<FeatureVector> prototypes;
    prototypes.reserve(k);
    for (const std::size_t idx : initial_indices) {
        if (idx >= points.size()) {
            throw ValidationError("initial index out of range");
        }
        prototypes.push_back(points[idx]);
    }

    auto assignments = assign_unchecked(points, prototypes, gamma);
    repair_empty_clusters(points, prototypes, assignments, gamma);

    ClusterModel model;
    model.k = k;
    model.gamma_used = gamma;
    model.converged = false;

    for (std::size_t iter = 1; iter <= max_iter; ++iter) {
        prototypes = update_unchecked(points, assignments, k, schema);
        const double cost = total_cost(points, prototypes, assignments, gamma);
        if (!model.cost_history.empty() &&
            cost > model.cost_history.back() * (1.0 + 1e-9) + 1e-12) {
            throw ComputationError("dispersion increased between iterations");
        }
        model.iterations_run = iter;
        model.cost_history.push_back(cost);
        if (trace != nullptr) {
            trace->costs.push_back(cost);
            trace->assignments.push_back(assignments);
        }
        if (iter == max_iter) {
            break;
        }
        auto next = assign_unchecked(points, prototypes, gamma);
        repair_empty_clusters(points, prototypes, next, gamma);
        if (next == assignments) {
            model.converged = true;
            break;
        }
        assignments = std::move(next);
    }

    model.prototypes = std::move(prototypes);
    model.assignments = std::move(assignments);
    model.cost = model.cost_history.back();
    return model;
}

ClusterModel fit(const std::vector<FeatureVector>& points, const ClusterConfig& config,
                 const FeatureSchema& schema, unsigned threads) {
    if (config.k == 0) {
        throw ValidationError("cluster count must be at least 1");
    }
    if (config.max_iter == 0 || config.n_restarts == 0) {
        throw ValidationError("max_iter and n_restarts must be at least 1");
    }
    if (config.gamma.has_value() && *config.gamma < 0.0) {
        throw ValidationError("gamma must be non-negative");
    }
    if (points.size() < config.k) {
        throw InfeasibleError("fit needs at least k points (" + std::to_string(points.size()) + " < " +
                              std::to_string(config.k) + ")");
    }
    for (const auto& p : points) {
        schema.validate(p);
    }

    std::vector<ColumnStandardization> standardization;
    const std::vector<FeatureVector>* fit_points = &points;
    std::vector<FeatureVector> transformed;
    if (config.standardize_numeric && schema.numeric_count() > 0) {
        standardization = numeric_moments(points, schema.numeric_count());
        transformed = points;
        for (auto& p : transformed) {
            for (std::size_t j = 0; j < p.numeric.size(); ++j) {
                const auto& s = standardization[j];
                p.numeric[j] = (p.numeric[j] - s.mean) / (s.stddev > 0.0 ? s.stddev : 1.0);
            }
        }
        fit_points = &transformed;
    }

    if (count_distinct(*fit_points, config.k) < config.k) {
        throw InfeasibleError("requested " + std::to_string(config.k) +
                              " clusters but the data has fewer distinct points");
    }

    const double gamma = config.gamma.has_value() ? *config.gamma : auto_gamma(*fit_points, schema);

    std::vector<ClusterModel> runs(config.n_restarts);
    parallel_for(config.n_restarts, threads, [&](std::size_t r) {
        const auto initial =
            select_initial_prototypes(*fit_points, config.k, derive_seed(config.seed, r));
        runs[r] = fit_single(*fit_points, schema, config.k, gamma, initial, config.max_iter, nullptr);
    });

    std::size_t best = 0;
    for (std::size_t r = 1; r < runs.size(); ++r) {
        if (runs[r].cost < runs[best].cost) {
            best = r;
        }
    }
    ClusterModel model = std::move(runs[best]);
    model.standardization = std::move(standardization);
    return model;
}

FeatureVector ClusterModel::prototype_in_input_units(std::size_t cluster) const {
    FeatureVector out = prototypes.at(cluster);
    for (std::size_t j = 0; j < out.numeric.size() && j < standardization.size(); ++j) {
        const auto& s = standardization[j];
        out.numeric[j] = out.numeric[j] * (s.stddev > 0.0 ? s.stddev : 1.0) + s.mean;
    }
    return out;
}

double average_dispersion(const ClusterModel& model, std::size_t n_points) {
    if (n_points == 0) {
        throw ValidationError("average_dispersion needs at least one point");
    }
    return model.cost / static_cast<double>(n_points);
}

DispersionCurve sweep_k(const std::vector<FeatureVector>& points, std::size_t k_min, std::size_t k_max,
                        const ClusterConfig& config_template, const FeatureSchema& schema,
                        unsigned threads) {
    if (k_min == 0 || k_min > k_max) {
        throw ValidationError("invalid k range");
    }
    const std::size_t count = k_max - k_min + 1;
    DispersionCurve curve;
    curve.points.resize(count);
    parallel_for(count, threads, [&](std::size_t i) {
        const std::size_t k = k_min + i;
        ClusterConfig cfg = config_template;
        cfg.k = k;
        cfg.seed = derive_seed(config_template.seed, 0xE1B0u + k);
        const ClusterModel model = fit(points, cfg, schema, 1);
        curve.points[i] = DispersionPoint{k, average_dispersion(model, points.size())};
    });
    return curve;
}

std::size_t select_elbow(const DispersionCurve& curve, double tau) {
    if (curve.points.size() < 2) {
        throw ValidationError("elbow selection needs at least two curve points");
    }
    if (!(tau > 0.0 && tau < 1.0)) {
        throw ValidationError("tau must lie in (0, 1)");
    }
    for (std::size_t i = 0; i + 1 < curve.points.size(); ++i) {
        if (curve.points[i + 1].k != curve.points[i].k + 1) {
            throw ValidationError("dispersion curve must cover consecutive k values");
        }
    }
    for (std::size_t i = 0; i + 1 < curve.points.size(); ++i) {
        const double d_k = curve.points[i].average_dispersion;
        const double d_next = curve.points[i + 1].average_dispersion;
        const double drop = d_k > 0.0 ? (d_k - d_next) / d_k : 0.0;
        if (drop < tau) {
            return curve.points[i].k;
        }
    }
    return curve.points.back().k;
}

namespace {

constexpr int kModelSchemaVersion = 1;

nlohmann::json vector_to_json(const FeatureVector& v) {
    return nlohmann::json{{"numeric", v.numeric}, {"categorical", v.categorical}};
}

FeatureVector vector_from_json(const nlohmann::json& j) {
    FeatureVector v;
    v.numeric = j.at("numeric").get<std::vector<double>>();
    v.categorical = j.at("categorical").get<std::vector<std::int32_t>>();
    return v;
}

} // namespace

std::string model_to_json(const ClusterModel& model, const FeatureSchema& schema,
                          const std::vector<std::string>& record_ids) {
    if (!record_ids.empty() && record_ids.size() != model.assignments.size()) {
        throw ValidationError("record id count does not match assignments");
    }
    nlohmann::json doc;
    doc["schema_version"] = kModelSchemaVersion;
    doc["k"] = model.k;
    doc["gamma_used"] = model.gamma_used;
    doc["cost"] = model.cost;
    doc["iterations_run"] = model.iterations_run;
    doc["converged"] = model.converged;

    nlohmann::json cols = nlohmann::json::array();
    for (const auto& col : schema.columns()) {
        nlohmann::json jc;
        jc["name"] = col.name;
        jc["kind"] = col.kind == ColumnKind::numeric ? "numeric" : "categorical";
        if (col.kind == ColumnKind::categorical) {
            jc["categories"] = col.categories;
        }
        cols.push_back(std::move(jc));
    }
    doc["columns"] = std::move(cols);

    nlohmann::json protos = nlohmann::json::array();
    for (const auto& p : model.prototypes) {
        protos.push_back(vector_to_json(p));
    }
    doc["prototypes"] = std::move(protos);
    doc["assignments"] = model.assignments;

    if (model.standardization.empty()) {
        doc["standardization"] = nullptr;
    } else {
        nlohmann::json st = nlohmann::json::array();
        for (const auto& s : model.standardization) {
            st.push_back(nlohmann::json{{"mean", s.mean}, {"stddev", s.stddev}});
        }
        doc["standardization"] = std::move(st);
    }
    doc["record_ids"] = record_ids;
    return doc.dump(2) + "\n";
}

ModelDocument model_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(std::string("model json parse error: ") + e.what());
    }
    if (doc.at("schema_version").get<int>() != kModelSchemaVersion) {
        throw ValidationError("unsupported model schema_version");
    }

    std::vector<Column> cols;
    for (const auto& jc : doc.at("columns")) {
        Column col;
        col.name = jc.at("name").get<std::string>();
        const auto kind = jc.at("kind").get<std::string>();
        if (kind == "numeric") {
            col.kind = ColumnKind::numeric;
        } else if (kind == "categorical") {
            col.kind = ColumnKind::categorical;
            col.categories = jc.at("categories").get<std::vector<std::string>>();
        } else {
            throw ValidationError("unknown column kind: " + kind);
        }
        cols.push_back(std::move(col));
    }

    ClusterModel model;
    model.k = doc.at("k").get<std::size_t>();
    model.gamma_used = doc.at("gamma_used").get<double>();
    model.cost = doc.at("cost").get<double>();
    model.iterations_run = doc.at("iterations_run").get<std::size_t>();
    model.converged = doc.value("converged", true);
    for (const auto& jp : doc.at("prototypes")) {
        model.prototypes.push_back(vector_from_json(jp));
    }
    model.assignments = doc.at("assignments").get<std::vector<std::size_t>>();
    if (!doc.at("standardization").is_null()) {
        for (const auto& js : doc.at("standardization")) {
            model.standardization.push_back(
                ColumnStandardization{js.at("mean").get<double>(), js.at("stddev").get<double>()});
        }
    }

    ModelDocument out{std::move(model), FeatureSchema(std::move(cols)),
                      doc.at("record_ids").get<std::vector<std::string>>()};
    return out;
}

void write_model_json(const std::filesystem::path& path, const ClusterModel& model,
                      const FeatureSchema& schema, const std::vector<std::string>& record_ids) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write model file: " + path.string());
    }
    out << model_to_json(model, schema, record_ids);
    if (!out) {
        throw IoError("write failed: " + path.string());
    }
}

ModelDocument read_model_json(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open model file: " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return model_from_json(buf.str());
}

} // namespace mobgap
