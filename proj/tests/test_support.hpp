#pragma once

// Shared helpers for the test suites: environment lookup, small dataset
// builders, and the independent oracles (exhaustive partition optimum and a
// reference Lloyd's K-means) used to cross-check the clustering engine.

#include "mobgap/cluster.hpp"
#include "mobgap/schema.hpp"
#include "mobgap/util.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

namespace testsupport {

inline std::filesystem::path data_path(const std::string& name) {
    const char* dir = std::getenv("MOBGAP_DATA");
    if (dir == nullptr) {
        throw std::runtime_error("MOBGAP_DATA is not set (run through ctest)");
    }
    return std::filesystem::path(dir) / name;
}

inline std::string cli_binary() {
    const char* bin = std::getenv("MOBGAP_BIN");
    if (bin == nullptr) {
        throw std::runtime_error("MOBGAP_BIN is not set (run through ctest)");
    }
    return bin;
}

// Fresh scratch directory, removed on destruction.
class TempDir {
  public:
    explicit TempDir(const std::string& tag) {
        static std::uint64_t counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("mobgap-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }

  private:
    std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    out << content;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// --- schema / dataset builders ------------------------------------------

inline mobgap::FeatureSchema numeric_schema(std::size_t dims) {
    std::vector<mobgap::Column> cols;
    for (std::size_t j = 0; j < dims; ++j) {
        cols.push_back({"x" + std::to_string(j), mobgap::ColumnKind::numeric, {}});
    }
    return mobgap::FeatureSchema(cols);
}

inline mobgap::FeatureSchema mixed_schema(std::size_t numeric_dims,
                                          const std::vector<int>& category_counts) {
    std::vector<mobgap::Column> cols;
    for (std::size_t j = 0; j < numeric_dims; ++j) {
        cols.push_back({"x" + std::to_string(j), mobgap::ColumnKind::numeric, {}});
    }
    for (std::size_t j = 0; j < category_counts.size(); ++j) {
        std::vector<std::string> levels;
        for (int l = 0; l < category_counts[j]; ++l) {
            levels.push_back("c" + std::to_string(j) + "_" + std::to_string(l));
        }
        cols.push_back({"c" + std::to_string(j), mobgap::ColumnKind::categorical, std::move(levels)});
    }
    return mobgap::FeatureSchema(cols);
}

inline mobgap::FeatureVector numeric_point(std::initializer_list<double> values) {
    return mobgap::FeatureVector{std::vector<double>(values), {}};
}

inline std::vector<mobgap::FeatureVector> random_mixed_points(mobgap::Rng& rng, std::size_t n,
                                                              std::size_t numeric_dims,
                                                              const std::vector<int>& category_counts) {
    std::vector<mobgap::FeatureVector> points(n);
    for (auto& p : points) {
        p.numeric.resize(numeric_dims);
        for (auto& x : p.numeric) {
            x = rng.uniform(-5.0, 5.0);
        }
        p.categorical.resize(category_counts.size());
        for (std::size_t j = 0; j < category_counts.size(); ++j) {
            p.categorical[j] =
                static_cast<std::int32_t>(rng.bounded(static_cast<std::uint64_t>(category_counts[j])));
        }
    }
    return points;
}

// --- exhaustive partition oracle ------------------------------------------
//
// Minimum total dispersion over all partitions of the points into exactly k
// non-empty blocks, scoring each block with its numeric mean and categorical
// mode. Independent of the engine's iterative path.

inline double partition_cost(const std::vector<mobgap::FeatureVector>& points,
                             const std::vector<std::size_t>& blocks, std::size_t k, double gamma) {
    const std::size_t n_num = points[0].numeric.size();
    const std::size_t n_cat = points[0].categorical.size();
    double cost = 0.0;
    for (std::size_t b = 0; b < k; ++b) {
        std::vector<const mobgap::FeatureVector*> members;
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (blocks[i] == b) {
                members.push_back(&points[i]);
            }
        }
        if (members.empty()) {
            return std::numeric_limits<double>::infinity();
        }
        for (std::size_t j = 0; j < n_num; ++j) {
            double mean = 0.0;
            for (const auto* m : members) {
                mean += m->numeric[j];
            }
            mean /= static_cast<double>(members.size());
            for (const auto* m : members) {
                const double d = m->numeric[j] - mean;
                cost += d * d;
            }
        }
        for (std::size_t j = 0; j < n_cat; ++j) {
            std::vector<std::size_t> counts;
            for (const auto* m : members) {
                const auto level = static_cast<std::size_t>(m->categorical[j]);
                if (level >= counts.size()) {
                    counts.resize(level + 1, 0);
                }
                ++counts[level];
            }
            std::size_t mode_count = 0;
            for (const std::size_t c : counts) {
                mode_count = std::max(mode_count, c);
            }
            cost += gamma * static_cast<double>(members.size() - mode_count);
        }
    }
    return cost;
}

inline void enumerate_partitions(const std::vector<mobgap::FeatureVector>& points, std::size_t k,
                                 double gamma, std::vector<std::size_t>& blocks, std::size_t index,
                                 std::size_t used, double& best) {
    const std::size_t n = points.size();
    if (index == n) {
        if (used == k) {
            best = std::min(best, partition_cost(points, blocks, k, gamma));
        }
        return;
    }
    // Canonical (restricted-growth) enumeration: each point joins an existing
    // block or opens the next one; prune when the remaining points cannot
    // fill the missing blocks.
    if (used + (n - index) < k) {
        return;
    }
    const std::size_t limit = std::min(used + 1, k);
    for (std::size_t b = 0; b < limit; ++b) {
        blocks[index] = b;
        enumerate_partitions(points, k, gamma, blocks, index + 1, std::max(used, b + 1), best);
    }
}

inline double exhaustive_min_cost(const std::vector<mobgap::FeatureVector>& points, std::size_t k,
                                  double gamma) {
    std::vector<std::size_t> blocks(points.size(), 0);
    double best = std::numeric_limits<double>::infinity();
    enumerate_partitions(points, k, gamma, blocks, 0, 0, best);
    return best;
}

// --- reference Lloyd's K-means ---------------------------------------------
//
// Plain-array implementation written against the same conventions (lowest
// index ties, farthest-point empty repair, assignment-stability stop) for the
// numeric-only reduction check.

struct RefLloydResult {
    std::vector<std::vector<std::size_t>> assignment_history;
    std::vector<std::vector<double>> centers;
    std::vector<std::size_t> assignments;
};

inline RefLloydResult reference_lloyd(const std::vector<std::vector<double>>& points,
                                      const std::vector<std::size_t>& initial_indices,
                                      std::size_t max_iter) {
    const std::size_t n = points.size();
    const std::size_t k = initial_indices.size();
    const std::size_t d = points[0].size();

    std::vector<std::vector<double>> centers;
    centers.reserve(k);
    for (const std::size_t idx : initial_indices) {
        centers.push_back(points[idx]);
    }

    const auto sq_dist = [&](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            const double diff = a[j] - b[j];
            s += diff * diff;
        }
        return s;
    };

    const auto assign_all = [&]() {
        std::vector<std::size_t> out(n, 0);
        for (std::size_t i = 0; i < n; ++i) {
            double best = sq_dist(points[i], centers[0]);
            std::size_t best_c = 0;
            for (std::size_t c = 1; c < k; ++c) {
                const double dist = sq_dist(points[i], centers[c]);
                if (dist < best) {
                    best = dist;
                    best_c = c;
                }
            }
            out[i] = best_c;
        }
        return out;
    };

    const auto repair = [&](std::vector<std::size_t>& a) {
        std::vector<std::size_t> sizes(k, 0);
        for (const std::size_t c : a) {
            ++sizes[c];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (sizes[c] != 0) {
                continue;
            }
            double worst = -1.0;
            std::size_t donor = n;
            for (std::size_t i = 0; i < n; ++i) {
                if (sizes[a[i]] <= 1) {
                    continue;
                }
                const double dist = sq_dist(points[i], centers[a[i]]);
                if (dist > worst) {
                    worst = dist;
                    donor = i;
                }
            }
            --sizes[a[donor]];
            centers[c] = points[donor];
            a[donor] = c;
            sizes[c] = 1;
        }
    };

    RefLloydResult result;
    auto assignments = assign_all();
    repair(assignments);

    for (std::size_t iter = 1; iter <= max_iter; ++iter) {
        result.assignment_history.push_back(assignments);
        // Update step.
        std::vector<std::vector<double>> sums(k, std::vector<double>(d, 0.0));
        std::vector<std::size_t> sizes(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            ++sizes[assignments[i]];
            for (std::size_t j = 0; j < d; ++j) {
                sums[assignments[i]][j] += points[i][j];
            }
        }
        for (std::size_t c = 0; c < k; ++c) {
            for (std::size_t j = 0; j < d; ++j) {
                centers[c][j] = sums[c][j] / static_cast<double>(sizes[c]);
            }
        }
        if (iter == max_iter) {
            break;
        }
        auto next = assign_all();
        repair(next);
        if (next == assignments) {
            break;
        }
        assignments = std::move(next);
    }
    result.centers = std::move(centers);
    result.assignments = std::move(assignments);
    return result;
}

} // namespace testsupport
