#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mobgap/cluster.hpp"
#include "mobgap/errors.hpp"
#include "mobgap/util.hpp"
#include "test_support.hpp"

#include <algorithm>
#include <cmath>

using namespace mobgap;
using namespace testsupport;

namespace {

FeatureVector mixed_point(std::initializer_list<double> nums, std::initializer_list<int> cats) {
    FeatureVector v;
    v.numeric = nums;
    for (const int c : cats) {
        v.categorical.push_back(static_cast<std::int32_t>(c));
    }
    return v;
}

// Two well-separated 1-D blobs used by several checks.
std::vector<FeatureVector> blob_points() {
    return {numeric_point({0.0}),  numeric_point({0.1}),  numeric_point({0.2}),
            numeric_point({10.0}), numeric_point({10.1}), numeric_point({10.2})};
}

} // namespace

TEST_CASE("mixed dissimilarity basics") {
    const auto schema = mixed_schema(2, {});
    const auto x = numeric_point({0.0, 0.0});
    const auto q = numeric_point({3.0, 4.0});

    CHECK(mixed_dissimilarity(x, x, 1.0, schema) == 0.0);
    CHECK(mixed_dissimilarity(x, q, 0.0, schema) == doctest::Approx(25.0));
    CHECK(mixed_dissimilarity(x, q, 7.5, schema) == doctest::Approx(25.0));
    CHECK(mixed_dissimilarity(x, q, 1.0, schema) == mixed_dissimilarity(q, x, 1.0, schema));

    const auto cat_schema = mixed_schema(0, {3, 3});
    const auto a = mixed_point({}, {0, 1}); // (A, B)
    const auto b = mixed_point({}, {0, 2}); // (A, C)
    CHECK(mixed_dissimilarity(a, b, 2.0, cat_schema) == doctest::Approx(2.0));
    CHECK(mixed_dissimilarity(a, a, 2.0, cat_schema) == 0.0);
}

TEST_CASE("mixed dissimilarity validation") {
    const auto schema = mixed_schema(1, {2});
    const auto ok = mixed_point({1.0}, {0});
    CHECK_THROWS_AS(mixed_dissimilarity(ok, numeric_point({1.0, 2.0}), 1.0, schema), ValidationError);
    CHECK_THROWS_AS(mixed_dissimilarity(ok, mixed_point({1.0}, {5}), 1.0, schema), ValidationError);
    CHECK_THROWS_AS(mixed_dissimilarity(ok, ok, -0.5, schema), ValidationError);
}

TEST_CASE("mixed dissimilarity is a semi-metric on random data") {
    const auto schema = mixed_schema(2, {3, 4});
    Rng rng(99);
    const auto points = random_mixed_points(rng, 40, 2, {3, 4});
    for (std::size_t i = 0; i + 1 < points.size(); i += 2) {
        const double d1 = mixed_dissimilarity(points[i], points[i + 1], 0.8, schema);
        const double d2 = mixed_dissimilarity(points[i + 1], points[i], 0.8, schema);
        CHECK(d1 == d2);
        CHECK(d1 >= 0.0);
        if (points[i] == points[i + 1]) {
            CHECK(d1 == 0.0);
        } else {
            CHECK(d1 > 0.0);
        }
    }
}

TEST_CASE("assign picks nearest prototype with lowest-index ties") {
    const auto schema = numeric_schema(1);

    SUBCASE("exact match wins") {
        const std::vector<FeatureVector> prototypes = {numeric_point({5.0}), numeric_point({9.0}),
                                                       numeric_point({2.0})};
        const auto result = assign({numeric_point({2.0})}, prototypes, 0.0, schema);
        CHECK(result == std::vector<std::size_t>{2});
    }
    SUBCASE("equidistant point goes to the lower index") {
        const std::vector<FeatureVector> prototypes = {numeric_point({0.0}), numeric_point({2.0})};
        const auto result = assign({numeric_point({1.0})}, prototypes, 0.0, schema);
        CHECK(result == std::vector<std::size_t>{0});
    }
    SUBCASE("1-D example") {
        const std::vector<FeatureVector> prototypes = {numeric_point({1.0}), numeric_point({9.0})};
        const auto result = assign({numeric_point({0.0}), numeric_point({10.0})}, prototypes, 0.0, schema);
        CHECK(result == std::vector<std::size_t>{0, 1});
    }
    SUBCASE("empty prototype list") {
        CHECK_THROWS_AS(assign({numeric_point({0.0})}, {}, 0.0, schema), ValidationError);
    }
}

TEST_CASE("update_prototypes computes means and modes") {
    const auto schema = mixed_schema(1, {2});
    const std::vector<FeatureVector> points = {mixed_point({1.0}, {0}), mixed_point({3.0}, {0}),
                                               mixed_point({2.0}, {1})};

    SUBCASE("mean and majority mode") {
        const auto prototypes = update_prototypes(points, {0, 0, 0}, 1, schema);
        CHECK(prototypes[0].numeric[0] == doctest::Approx(2.0));
        CHECK(prototypes[0].categorical[0] == 0);
    }
    SUBCASE("singleton cluster reproduces its member") {
        const auto prototypes = update_prototypes(points, {0, 1, 1}, 2, schema);
        CHECK(prototypes[0] == points[0]);
    }
    SUBCASE("mode tie breaks to the lowest category index") {
        const std::vector<FeatureVector> tied = {mixed_point({0.0}, {1}), mixed_point({0.0}, {0})};
        const auto prototypes = update_prototypes(tied, {0, 0}, 1, schema);
        CHECK(prototypes[0].categorical[0] == 0);
    }
    SUBCASE("empty cluster is an error for direct callers") {
        CHECK_THROWS_AS(update_prototypes(points, {0, 0, 0}, 2, schema), EmptyClusterError);
    }
    SUBCASE("out-of-range assignment is a validation error") {
        CHECK_THROWS_AS(update_prototypes(points, {0, 0, 7}, 2, schema), ValidationError);
    }
}

TEST_CASE("auto_gamma follows numeric spread") {
    SUBCASE("single column, population stddev 1") {
        const auto schema = numeric_schema(1);
        const double g = auto_gamma({numeric_point({0.0}), numeric_point({2.0})}, schema);
        CHECK(g == doctest::Approx(0.5));
    }
    SUBCASE("z-scored columns give exactly one half") {
        const auto schema = numeric_schema(2);
        // Already standardized: mean 0, population stddev 1 per column.
        const std::vector<FeatureVector> pts = {numeric_point({-1.0, 1.0}), numeric_point({1.0, -1.0})};
        CHECK(auto_gamma(pts, schema) == doctest::Approx(0.5));
    }
    SUBCASE("no numeric columns degrades to K-modes weighting") {
        const auto schema = mixed_schema(0, {2});
        CHECK(auto_gamma({mixed_point({}, {0})}, schema) == doctest::Approx(1.0));
    }
}

TEST_CASE("fit separates two blobs and matches the exhaustive optimum") {
    const auto schema = numeric_schema(1);
    const auto points = blob_points();

    ClusterConfig cfg;
    cfg.k = 2;
    cfg.gamma = 0.0;
    cfg.n_restarts = 5;
    cfg.seed = 3;
    cfg.standardize_numeric = false;

    const auto model = fit(points, cfg, schema);
    CHECK(model.assignments[0] == model.assignments[1]);
    CHECK(model.assignments[1] == model.assignments[2]);
    CHECK(model.assignments[3] == model.assignments[4]);
    CHECK(model.assignments[4] == model.assignments[5]);
    CHECK(model.assignments[0] != model.assignments[3]);

    const double oracle = exhaustive_min_cost(points, 2, 0.0);
    CHECK(model.cost == doctest::Approx(oracle).epsilon(1e-9));
}

TEST_CASE("fit edge cases") {
    const auto schema = numeric_schema(1);
    const auto points = blob_points();

    SUBCASE("k equal to the number of distinct points gives zero cost") {
        ClusterConfig cfg;
        cfg.k = points.size();
        cfg.gamma = 0.0;
        cfg.n_restarts = 2;
        cfg.standardize_numeric = false;
        const auto model = fit(points, cfg, schema);
        CHECK(model.cost == doctest::Approx(0.0));
    }
    SUBCASE("k=1 yields the global mean and total dispersion") {
        ClusterConfig cfg;
        cfg.k = 1;
        cfg.gamma = 0.0;
        cfg.standardize_numeric = false;
        const auto model = fit(points, cfg, schema);
        CHECK(model.prototypes[0].numeric[0] == doctest::Approx(5.1));
        double total = 0.0;
        for (const auto& p : points) {
            const double d = p.numeric[0] - 5.1;
            total += d * d;
        }
        CHECK(model.cost == doctest::Approx(total));
    }
    SUBCASE("k=0 is a validation error") {
        ClusterConfig cfg;
        cfg.k = 0;
        CHECK_THROWS_AS(fit(points, cfg, schema), ValidationError);
    }
    SUBCASE("k beyond the distinct point count is infeasible") {
        const std::vector<FeatureVector> dupes = {numeric_point({1.0}), numeric_point({1.0}),
                                                  numeric_point({2.0})};
        ClusterConfig cfg;
        cfg.k = 3;
        cfg.standardize_numeric = false;
        CHECK_THROWS_AS(fit(dupes, cfg, schema), InfeasibleError);
    }
    SUBCASE("k=1 over {0,2} has cost 2 and average dispersion 1") {
        const std::vector<FeatureVector> pair = {numeric_point({0.0}), numeric_point({2.0})};
        ClusterConfig cfg;
        cfg.k = 1;
        cfg.gamma = 0.0;
        cfg.standardize_numeric = false;
        const auto model = fit(pair, cfg, schema);
        CHECK(model.cost == doctest::Approx(2.0));
        CHECK(average_dispersion(model, 2) == doctest::Approx(1.0));
    }
}

TEST_CASE("fitted models satisfy their invariants on random data") {
    const auto schema = mixed_schema(2, {3, 2});
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        Rng rng(derive_seed(1234, seed));
        const auto points = random_mixed_points(rng, 50, 2, {3, 2});

        ClusterConfig cfg;
        cfg.k = 3;
        cfg.seed = seed;
        cfg.n_restarts = 4;

        const auto model = fit(points, cfg, schema);
        CHECK(model.converged);

        // Cost history is non-increasing.
        for (std::size_t i = 0; i + 1 < model.cost_history.size(); ++i) {
            CHECK(model.cost_history[i + 1] <= model.cost_history[i] * (1.0 + 1e-9) + 1e-12);
        }

        // Cost is recomputable from assignments and prototypes. Standardized
        // fits recompute in the fitted space.
        std::vector<FeatureVector> space = points;
        for (auto& p : space) {
            for (std::size_t j = 0; j < p.numeric.size(); ++j) {
                const auto& s = model.standardization[j];
                p.numeric[j] = (p.numeric[j] - s.mean) / (s.stddev > 0.0 ? s.stddev : 1.0);
            }
        }
        double recomputed = 0.0;
        for (std::size_t i = 0; i < space.size(); ++i) {
            recomputed +=
                mixed_dissimilarity(space[i], model.prototypes[model.assignments[i]], model.gamma_used,
                                    schema);
        }
        CHECK(model.cost == doctest::Approx(recomputed).epsilon(1e-9));

        // Re-running assign changes nothing.
        CHECK(assign(space, model.prototypes, model.gamma_used, schema) == model.assignments);

        // No empty clusters.
        std::vector<std::size_t> sizes(model.k, 0);
        for (const std::size_t a : model.assignments) {
            ++sizes[a];
        }
        CHECK(std::count(sizes.begin(), sizes.end(), 0) == 0);
    }
}

TEST_CASE("fit is deterministic regardless of thread count") {
    const auto schema = mixed_schema(2, {3});
    Rng rng(7);
    const auto points = random_mixed_points(rng, 80, 2, {3});

    ClusterConfig cfg;
    cfg.k = 4;
    cfg.seed = 42;
    cfg.n_restarts = 8;

    const auto a = fit(points, cfg, schema, 1);
    const auto b = fit(points, cfg, schema, 4);
    const auto c = fit(points, cfg, schema, 1);
    CHECK(a.cost == b.cost);
    CHECK(a.assignments == b.assignments);
    CHECK(a.prototypes == b.prototypes);
    CHECK(a.gamma_used == b.gamma_used);
    CHECK(a.assignments == c.assignments);
    CHECK(a.cost_history == b.cost_history);
}

TEST_CASE("permuting points with matching initial records permutes the result") {
    const auto schema = mixed_schema(1, {2});
    Rng rng(11);
    const auto points = random_mixed_points(rng, 30, 1, {2});

    const std::vector<std::size_t> initial = {3, 17, 26};
    const auto base = fit_single(points, schema, 3, 0.5, initial, 100);

    // Reverse the point order and remap the initial records accordingly.
    std::vector<FeatureVector> reversed(points.rbegin(), points.rend());
    const auto remap = [&](std::size_t i) { return points.size() - 1 - i; };
    const std::vector<std::size_t> initial_rev = {remap(3), remap(17), remap(26)};
    const auto perm = fit_single(reversed, schema, 3, 0.5, initial_rev, 100);

    // Means accumulate in input order, so prototypes agree only up to
    // floating-point rounding; assignments and modes are exact.
    REQUIRE(base.prototypes.size() == perm.prototypes.size());
    for (std::size_t c = 0; c < base.prototypes.size(); ++c) {
        CHECK(base.prototypes[c].categorical == perm.prototypes[c].categorical);
        for (std::size_t j = 0; j < base.prototypes[c].numeric.size(); ++j) {
            CHECK(base.prototypes[c].numeric[j] ==
                  doctest::Approx(perm.prototypes[c].numeric[j]).epsilon(1e-12));
        }
    }
    CHECK(base.cost == doctest::Approx(perm.cost).epsilon(1e-12));
    for (std::size_t i = 0; i < points.size(); ++i) {
        CHECK(base.assignments[i] == perm.assignments[remap(i)]);
    }
}

TEST_CASE("gamma zero on numeric data reduces to reference Lloyd") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        Rng rng(derive_seed(555, seed));
        const std::size_t n = 25 + rng.bounded(20);
        const auto points = random_mixed_points(rng, n, 2, {});
        const auto schema = numeric_schema(2);

        const auto initial = select_initial_prototypes(points, 3, seed);
        FitTrace trace;
        const auto model = fit_single(points, schema, 3, 0.0, initial, 100, &trace);

        std::vector<std::vector<double>> raw;
        for (const auto& p : points) {
            raw.push_back(p.numeric);
        }
        const auto ref = reference_lloyd(raw, initial, 100);

        REQUIRE(trace.assignments.size() == ref.assignment_history.size());
        for (std::size_t t = 0; t < trace.assignments.size(); ++t) {
            CHECK(trace.assignments[t] == ref.assignment_history[t]);
        }
        CHECK(model.assignments == ref.assignments);
    }
}

TEST_CASE("pure categorical data with gamma one behaves as K-modes") {
    const auto schema = mixed_schema(0, {3, 3, 2});
    Rng rng(2024);
    const auto points = random_mixed_points(rng, 40, 0, {3, 3, 2});

    // Dissimilarity equals the Hamming distance.
    for (std::size_t i = 0; i + 1 < points.size(); i += 2) {
        int hamming = 0;
        for (std::size_t j = 0; j < 3; ++j) {
            hamming += points[i].categorical[j] != points[i + 1].categorical[j] ? 1 : 0;
        }
        CHECK(mixed_dissimilarity(points[i], points[i + 1], 1.0, schema) ==
              doctest::Approx(static_cast<double>(hamming)));
    }

    ClusterConfig cfg;
    cfg.k = 3;
    cfg.gamma = 1.0;
    cfg.seed = 9;
    const auto model = fit(points, cfg, schema);
    CHECK(model.standardization.empty());
    // Prototypes are per-cluster modes.
    const auto modes = update_prototypes(points, model.assignments, model.k, schema);
    CHECK(model.prototypes == modes);
}

TEST_CASE("average_dispersion divides cost by the point count") {
    ClusterModel model;
    model.cost = 0.0;
    CHECK(average_dispersion(model, 7) == 0.0);
    model.cost = 50.0;
    CHECK(average_dispersion(model, 10) == doctest::Approx(5.0));
    CHECK_THROWS_AS(average_dispersion(model, 0), ValidationError);
}

TEST_CASE("sweep_k produces one point per k") {
    const auto schema = numeric_schema(1);
    const auto points = blob_points();

    ClusterConfig tmpl;
    tmpl.gamma = 0.0;
    tmpl.n_restarts = 6;
    tmpl.seed = 17;
    tmpl.standardize_numeric = false;

    SUBCASE("k equal to n on distinct points is zero") {
        const auto curve = sweep_k(points, points.size(), points.size(), tmpl, schema);
        REQUIRE(curve.points.size() == 1);
        CHECK(curve.points[0].average_dispersion == doctest::Approx(0.0));
    }
    SUBCASE("k=1 is total dispersion over n") {
        const auto curve = sweep_k(points, 1, 1, tmpl, schema);
        ClusterConfig cfg = tmpl;
        cfg.k = 1;
        const auto model = fit(points, cfg, schema);
        CHECK(curve.points[0].average_dispersion ==
              doctest::Approx(model.cost / static_cast<double>(points.size())));
    }
    SUBCASE("blob range 1..3 decreases with a sharp drop at 2, matching the oracle") {
        const auto curve = sweep_k(points, 1, 3, tmpl, schema, 3);
        REQUIRE(curve.points.size() == 3);
        CHECK(curve.points[0].average_dispersion > curve.points[1].average_dispersion);
        CHECK(curve.points[1].average_dispersion > curve.points[2].average_dispersion);
        const double drop1 = (curve.points[0].average_dispersion - curve.points[1].average_dispersion) /
                             curve.points[0].average_dispersion;
        CHECK(drop1 > 0.9); // blobs are 100x tighter than their separation
        for (std::size_t i = 0; i < 3; ++i) {
            const double oracle = exhaustive_min_cost(points, i + 1, 0.0) / 6.0;
            CHECK(curve.points[i].average_dispersion == doctest::Approx(oracle).epsilon(1e-9));
        }
    }
}

TEST_CASE("select_elbow applies the relative-drop rule") {
    const auto curve_of = [](std::initializer_list<std::pair<std::size_t, double>> pts) {
        DispersionCurve c;
        for (const auto& [k, d] : pts) {
            c.points.push_back({k, d});
        }
        return c;
    };

    SUBCASE("reference curve selects 3 at tau 0.07") {
        const auto curve =
            curve_of({{1, 100.0}, {2, 50.0}, {3, 26.0}, {4, 24.5}, {5, 24.0}});
        CHECK(select_elbow(curve, 0.07) == 3);
    }
    SUBCASE("flat curve selects the first k") {
        CHECK(select_elbow(curve_of({{1, 10.0}, {2, 10.0}, {3, 10.0}}), 0.2) == 1);
    }
    SUBCASE("geometric halving never flattens") {
        CHECK(select_elbow(curve_of({{1, 16.0}, {2, 8.0}, {3, 4.0}, {4, 2.0}}), 0.1) == 4);
    }
    SUBCASE("zero dispersion counts as a zero drop") {
        CHECK(select_elbow(curve_of({{2, 0.0}, {3, 0.0}}), 0.3) == 2);
    }
    SUBCASE("validation") {
        CHECK_THROWS_AS(select_elbow(curve_of({{1, 1.0}}), 0.1), ValidationError);
        CHECK_THROWS_AS(select_elbow(curve_of({{1, 1.0}, {2, 0.5}}), 0.0), ValidationError);
        CHECK_THROWS_AS(select_elbow(curve_of({{1, 1.0}, {2, 0.5}}), 1.0), ValidationError);
        CHECK_THROWS_AS(select_elbow(curve_of({{1, 1.0}, {4, 0.5}}), 0.1), ValidationError);
    }
}

TEST_CASE("model JSON round trip") {
    const auto schema = mixed_schema(2, {3});
    Rng rng(31);
    const auto points = random_mixed_points(rng, 25, 2, {3});

    ClusterConfig cfg;
    cfg.k = 2;
    cfg.seed = 5;
    const auto model = fit(points, cfg, schema);

    std::vector<std::string> ids;
    for (std::size_t i = 0; i < points.size(); ++i) {
        ids.push_back("r" + std::to_string(i));
    }

    const auto text = model_to_json(model, schema, ids);
    const auto doc = model_from_json(text);
    CHECK(doc.model.k == model.k);
    CHECK(doc.model.prototypes == model.prototypes);
    CHECK(doc.model.assignments == model.assignments);
    CHECK(doc.model.cost == model.cost);
    CHECK(doc.model.gamma_used == model.gamma_used);
    CHECK(doc.model.standardization.size() == model.standardization.size());
    CHECK(doc.schema == schema);
    CHECK(doc.record_ids == ids);

    CHECK_THROWS_AS(model_from_json("{not json"), ValidationError);
}
