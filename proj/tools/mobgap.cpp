#include "mobgap/cluster.hpp"
#include "mobgap/csv.hpp"
#include "mobgap/errors.hpp"
#include "mobgap/gaps.hpp"
#include "mobgap/income.hpp"
#include "mobgap/stats.hpp"
#include "mobgap/survey.hpp"
#include "mobgap/svg.hpp"
#include "mobgap/synth.hpp"
#include "mobgap/util.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kToolVersion = "0.1.0";
constexpr const char* kTieBreakPolicy = "lowest-index-v1";

constexpr int kExitValidation = 1;
constexpr int kExitComputation = 2;
constexpr int kExitIo = 3;

struct InputPaths {
    std::string households;
    std::string persons;
    std::string trips;
    std::string column_map;    // optional; defaults to the NHTS 2017 map
    std::string geography_map; // required for feature derivation
    std::string thresholds;    // required wherever income enters
    std::string brackets;      // optional; needed for bracketed incomes
    std::string model;         // prior cluster model (gaps subcommand)
};

struct ClusterSettings {
    std::optional<std::size_t> k;
    std::optional<std::pair<std::size_t, std::size_t>> k_range;
    double tau = 0.07;
    std::optional<double> gamma; // nullopt = auto
    std::size_t restarts = 10;
    std::size_t max_iter = 100;
    bool standardize = true;
};

struct RunConfig {
    std::string out = "out";
    std::uint64_t seed = 0;
    unsigned threads = 0; // 0 = hardware concurrency
    bool strict = true;
    bool weighted = true;
    std::set<std::string> exclude_modes{"19"};
    InputPaths inputs;
    bool synth_mode = false;
    std::string synth_spec_path; // empty = built-in default spec
    std::optional<std::size_t> synth_households;
    ClusterSettings cluster;
};

RunConfig config_from_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw mobgap::IoError("cannot open config: " + path);
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw mobgap::ValidationError(path + ": config parse error: " + e.what());
    }

    RunConfig cfg;
    cfg.out = doc.value("out", cfg.out);
    cfg.seed = doc.value("seed", cfg.seed);
    cfg.threads = doc.value("threads", cfg.threads);
    cfg.strict = doc.value("strict", cfg.strict);
    cfg.weighted = doc.value("weighted", cfg.weighted);
    if (doc.contains("exclude_modes")) {
        cfg.exclude_modes.clear();
        for (const auto& m : doc.at("exclude_modes")) {
            cfg.exclude_modes.insert(m.get<std::string>());
        }
    }
    if (doc.contains("inputs")) {
        const auto& in_doc = doc.at("inputs");
        cfg.inputs.households = in_doc.value("households", "");
        cfg.inputs.persons = in_doc.value("persons", "");
        cfg.inputs.trips = in_doc.value("trips", "");
        cfg.inputs.column_map = in_doc.value("column_map", "");
        cfg.inputs.geography_map = in_doc.value("geography_map", "");
        cfg.inputs.thresholds = in_doc.value("thresholds", "");
        cfg.inputs.brackets = in_doc.value("brackets", "");
        cfg.inputs.model = in_doc.value("model", "");
    }
    if (doc.contains("synth")) {
        cfg.synth_mode = true;
        const auto& s = doc.at("synth");
        cfg.synth_spec_path = s.value("spec", "");
        if (s.contains("households")) {
            cfg.synth_households = s.at("households").get<std::size_t>();
        }
    }
    if (doc.contains("cluster")) {
        const auto& c = doc.at("cluster");
        if (c.contains("k") && !c.at("k").is_null()) {
            cfg.cluster.k = c.at("k").get<std::size_t>();
        }
        if (c.contains("k_range") && !c.at("k_range").is_null()) {
            const auto& r = c.at("k_range");
            cfg.cluster.k_range = std::make_pair(r.at(0).get<std::size_t>(), r.at(1).get<std::size_t>());
        }
        cfg.cluster.tau = c.value("tau", cfg.cluster.tau);
        if (c.contains("gamma") && !c.at("gamma").is_null()) {
            if (c.at("gamma").is_string()) {
                if (c.at("gamma").get<std::string>() != "auto") {
                    throw mobgap::ValidationError("cluster.gamma must be a number or \"auto\"");
                }
            } else {
                cfg.cluster.gamma = c.at("gamma").get<double>();
            }
        }
        cfg.cluster.restarts = c.value("restarts", cfg.cluster.restarts);
        cfg.cluster.max_iter = c.value("max_iter", cfg.cluster.max_iter);
        cfg.cluster.standardize = c.value("standardize", cfg.cluster.standardize);
    }
    return cfg;
}

json config_echo(const RunConfig& cfg) {
    json doc;
    doc["out"] = cfg.out;
    doc["seed"] = cfg.seed;
    doc["threads"] = cfg.threads;
    doc["strict"] = cfg.strict;
    doc["weighted"] = cfg.weighted;
    doc["exclude_modes"] = cfg.exclude_modes;
    json inputs;
    inputs["households"] = cfg.inputs.households;
    inputs["persons"] = cfg.inputs.persons;
    inputs["trips"] = cfg.inputs.trips;
    inputs["column_map"] = cfg.inputs.column_map;
    inputs["geography_map"] = cfg.inputs.geography_map;
    inputs["thresholds"] = cfg.inputs.thresholds;
    inputs["brackets"] = cfg.inputs.brackets;
    inputs["model"] = cfg.inputs.model;
    doc["inputs"] = std::move(inputs);
    if (cfg.synth_mode) {
        json s;
        s["spec"] = cfg.synth_spec_path;
        if (cfg.synth_households) {
            s["households"] = *cfg.synth_households;
        }
        doc["synth"] = std::move(s);
    }
    json c;
    if (cfg.cluster.k) {
        c["k"] = *cfg.cluster.k;
    }
    if (cfg.cluster.k_range) {
        c["k_range"] = json::array({cfg.cluster.k_range->first, cfg.cluster.k_range->second});
    }
    c["tau"] = cfg.cluster.tau;
    c["gamma"] = cfg.cluster.gamma ? json(*cfg.cluster.gamma) : json("auto");
    c["restarts"] = cfg.cluster.restarts;
    c["max_iter"] = cfg.cluster.max_iter;
    c["standardize"] = cfg.cluster.standardize;
    c["tie_break_policy"] = kTieBreakPolicy;
    doc["cluster"] = std::move(c);
    return doc;
}

// Removes this run's outputs when the pipeline fails partway.
class OutputTracker {
  public:
    void track(const fs::path& path) { created_.push_back(path); }

    void discard_all() {
        for (const auto& p : created_) {
            std::error_code ec;
            fs::remove(p, ec);
        }
        created_.clear();
    }

    void commit() { created_.clear(); }

  private:
    std::vector<fs::path> created_;
};

class StageClock {
  public:
    explicit StageClock(json& stages) : stages_(stages) {}

    void start(const std::string& name) {
        current_ = name;
        t0_ = std::chrono::steady_clock::now();
    }

    void finish(json details = json::object()) {
        const auto elapsed = std::chrono::steady_clock::now() - t0_;
        details["stage"] = current_;
        details["ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count();
        stages_.push_back(std::move(details));
    }

    const std::string& current() const { return current_; }

  private:
    json& stages_;
    std::string current_;
    std::chrono::steady_clock::time_point t0_;
};

unsigned resolve_threads(unsigned requested) {
    if (requested != 0) {
        return requested;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

void require(bool ok, const std::string& message) {
    if (!ok) {
        throw mobgap::ValidationError(message);
    }
}

enum class Command { run, synth, cluster, gaps, elbow };

int run_pipeline(Command command, RunConfig cfg) {
    const unsigned threads = resolve_threads(cfg.threads);
    const fs::path outdir = cfg.out;

    const bool wants_income = command == Command::run || command == Command::synth ||
                              command == Command::gaps;
    const bool wants_cluster = command == Command::run || command == Command::cluster ||
                               command == Command::elbow;
    const bool wants_gaps = command == Command::run || command == Command::gaps;

    if (command == Command::elbow) {
        require(cfg.cluster.k_range.has_value(), "elbow requires a k range (--k-range A..B)");
    } else if (wants_cluster) {
        require(cfg.cluster.k.has_value() != cfg.cluster.k_range.has_value(),
                "exactly one of --k and --k-range must be set");
    }
    if (wants_income) {
        require(!cfg.inputs.thresholds.empty(),
                "an income threshold table is required (--thresholds); there is no built-in default");
    }
    if (command == Command::gaps) {
        require(!cfg.inputs.model.empty(), "gaps requires a fitted model (--model)");
    }
    if (!cfg.synth_mode && command != Command::gaps) {
        if (command != Command::synth) {
            require(!cfg.inputs.households.empty() && !cfg.inputs.persons.empty() &&
                        !cfg.inputs.trips.empty(),
                    "household, person and trip CSV paths are required without a synth spec");
        } else {
            require(false, "synth requires a synth spec section or built-in default (--spec)");
        }
    }

    fs::create_directories(outdir);
    OutputTracker outputs;
    json stages = json::array();
    StageClock clock(stages);
    json manifest;
    json input_digests = json::object();
    json output_digests = json::object();

    const auto digest_input = [&](const std::string& path) {
        if (!path.empty() && input_digests.find(path) == input_digests.end()) {
            input_digests[path] = mobgap::sha256_file_hex(path);
        }
    };
    const auto write_output = [&](const fs::path& path, const std::string& content) {
        mobgap::write_text_file(path, content);
        outputs.track(path);
        output_digests[path.filename().string()] = mobgap::sha256_hex(content);
    };

    try {
        // --- synth ---
        mobgap::SurveySpec spec;
        if (cfg.synth_mode) {
            clock.start("synth");
            spec = cfg.synth_spec_path.empty()
                       ? mobgap::default_survey_spec()
                       : mobgap::survey_spec_from_json_file(cfg.synth_spec_path);
            if (cfg.synth_households) {
                spec.households = *cfg.synth_households;
            }
            digest_input(cfg.synth_spec_path);
            digest_input(cfg.inputs.thresholds);
            const auto thresholds = mobgap::load_threshold_table(cfg.inputs.thresholds);
            const fs::path synth_dir = outdir / "synth";
            const auto result = mobgap::synthesize(spec, thresholds, cfg.seed, synth_dir);
            for (const auto& p : {result.households_csv, result.persons_csv, result.trips_csv,
                                  result.truth_csv}) {
                outputs.track(p);
                output_digests[(fs::path("synth") / p.filename()).string()] =
                    mobgap::sha256_file_hex(p.string());
            }
            cfg.inputs.households = result.households_csv.string();
            cfg.inputs.persons = result.persons_csv.string();
            cfg.inputs.trips = result.trips_csv.string();
            clock.finish(json{{"households", spec.households}});
            if (command == Command::synth) {
                manifest["synth_files"] = json::array({result.households_csv.string(),
                                                       result.persons_csv.string(),
                                                       result.trips_csv.string(),
                                                       result.truth_csv.string()});
            }
        }

        mobgap::SurveyStore store;
        std::vector<mobgap::IncomeClass> income_classes;
        std::vector<mobgap::HouseholdFeatures> features;
        std::vector<mobgap::FeatureVector> matrix;
        std::vector<std::string> household_ids;

        if (command != Command::synth) {
            // --- load ---
            clock.start("load");
            const mobgap::ColumnMap columns =
                cfg.synth_mode ? mobgap::synthetic_column_map()
                : cfg.inputs.column_map.empty()
                    ? mobgap::ColumnMap::nhts2017()
                    : mobgap::ColumnMap::from_json_file(cfg.inputs.column_map);
            digest_input(cfg.inputs.column_map);
            digest_input(cfg.inputs.households);
            digest_input(cfg.inputs.persons);
            digest_input(cfg.inputs.trips);
            store = mobgap::load_survey(cfg.inputs.households, cfg.inputs.persons, cfg.inputs.trips,
                                        columns,
                                        cfg.strict ? mobgap::LoadMode::strict : mobgap::LoadMode::lenient);
            for (const auto& issue : store.diagnostics.issues) {
                std::cerr << "note: dropped " << issue.file << " row " << issue.row << ": "
                          << issue.message << "\n";
            }
            for (const auto& hh : store.households) {
                household_ids.push_back(hh.household_id);
            }
            clock.finish(json{{"households", store.diagnostics.households_kept},
                              {"persons", store.diagnostics.persons_kept},
                              {"trips", store.diagnostics.trips_kept},
                              {"rejected", store.diagnostics.issues.size()}});

            // --- classify income ---
            if (wants_income) {
                clock.start("classify");
                digest_input(cfg.inputs.thresholds);
                digest_input(cfg.inputs.brackets);
                const auto thresholds = mobgap::load_threshold_table(cfg.inputs.thresholds);
                std::optional<mobgap::BracketMap> brackets;
                if (!cfg.inputs.brackets.empty()) {
                    brackets = mobgap::load_bracket_map(cfg.inputs.brackets);
                }
                std::size_t low = 0;
                for (const auto& hh : store.households) {
                    const auto cls = mobgap::classify(mobgap::make_income_observation(hh), thresholds,
                                                      brackets ? &*brackets : nullptr);
                    income_classes.push_back(cls);
                    low += cls == mobgap::IncomeClass::low_income ? 1 : 0;
                }
                clock.finish(json{{"low_income", low},
                                  {"not_low_income", store.households.size() - low},
                                  {"definition", thresholds.definition_name()}});
            }

            // --- derive features ---
            clock.start("features");
            digest_input(cfg.inputs.geography_map);
            require(!cfg.inputs.geography_map.empty(),
                    "a geography map (region_code,nyc_flag CSV) is required");
            const auto geography = mobgap::GeographyMap::load(cfg.inputs.geography_map);
            features = mobgap::derive_all_features(store, geography);
            matrix = mobgap::to_feature_matrix(features);
            clock.finish(json{{"rows", matrix.size()}});
        }

        const mobgap::FeatureSchema& schema = mobgap::household_feature_schema();
        std::optional<mobgap::ClusterModel> model;
        std::size_t cluster_count = 0;
        std::vector<std::size_t> assignments;

        if (wants_cluster) {
            mobgap::ClusterConfig cluster_cfg;
            cluster_cfg.gamma = cfg.cluster.gamma;
            cluster_cfg.max_iter = cfg.cluster.max_iter;
            cluster_cfg.n_restarts = cfg.cluster.restarts;
            cluster_cfg.seed = cfg.seed;
            cluster_cfg.standardize_numeric = cfg.cluster.standardize;

            std::size_t chosen_k = cfg.cluster.k.value_or(0);
            if (cfg.cluster.k_range) {
                // --- sweep + elbow ---
                clock.start("sweep");
                const auto [k_min, k_max] = *cfg.cluster.k_range;
                const auto curve = mobgap::sweep_k(matrix, k_min, k_max, cluster_cfg, schema, threads);
                chosen_k = mobgap::select_elbow(curve, cfg.cluster.tau);

                mobgap::csv::Table elbow_csv({"k", "average_dispersion"}, {});
                for (const auto& p : curve.points) {
                    elbow_csv.append_row({std::to_string(p.k),
                                          mobgap::format_double(p.average_dispersion)});
                }
                write_output(outdir / "elbow.csv", elbow_csv.to_string());
                write_output(outdir / "elbow.svg", mobgap::render_elbow_svg(curve, chosen_k));
                manifest["selected_k"] = chosen_k;
                clock.finish(json{{"k_min", k_min}, {"k_max", k_max}, {"selected_k", chosen_k}});
                std::cout << "selected k = " << chosen_k << " (tau " << cfg.cluster.tau << ")\n";
            } else {
                manifest["selected_k"] = chosen_k;
            }

            if (command != Command::elbow) {
                // --- fit ---
                clock.start("fit");
                cluster_cfg.k = chosen_k;
                model = mobgap::fit(matrix, cluster_cfg, schema, threads);
                cluster_count = model->k;
                assignments = model->assignments;
                write_output(outdir / "model.json",
                             mobgap::model_to_json(*model, schema, household_ids));
                manifest["gamma_used"] = model->gamma_used;
                clock.finish(json{{"k", model->k},
                                  {"cost", model->cost},
                                  {"gamma_used", model->gamma_used},
                                  {"iterations", model->iterations_run},
                                  {"converged", model->converged}});
            }
        }

        if (command == Command::gaps) {
            // --- load prior model ---
            clock.start("model");
            digest_input(cfg.inputs.model);
            auto doc = mobgap::read_model_json(cfg.inputs.model);
            require(doc.schema == schema, "model feature schema does not match this tool's schema");
            require(doc.record_ids == household_ids,
                    "model record ids do not match the household file (was the model fit on this data?)");
            cluster_count = doc.model.k;
            assignments = doc.model.assignments;
            manifest["gamma_used"] = doc.model.gamma_used;
            manifest["selected_k"] = doc.model.k;
            clock.finish(json{{"k", doc.model.k}});
        }

        if (wants_gaps) {
            // --- gaps + summary ---
            clock.start("gaps");
            const auto metrics = mobgap::default_metrics(cfg.exclude_modes);
            const auto weighting =
                cfg.weighted ? mobgap::Weighting::weighted : mobgap::Weighting::unweighted;
            const auto report =
                mobgap::compute_gaps(store, income_classes, assignments, cluster_count, metrics,
                                     weighting);
            const auto summary =
                mobgap::cluster_summary(store, features, assignments, cluster_count, income_classes);
            write_output(outdir / "gaps.csv", mobgap::gaps_to_csv(report));
            write_output(outdir / "cluster_summary.csv", mobgap::cluster_summary_to_csv(summary));
            write_output(outdir / "report.json",
                         mobgap::report_bundle_to_json(report, summary, weighting));
            for (const auto& metric : metrics) {
                write_output(outdir / (std::string("gap_") + mobgap::to_string(metric.name) + ".svg"),
                             mobgap::render_gap_chart_svg(report, metric.name));
            }
            clock.finish(json{{"rows", report.size()}});
        }

        // --- manifest ---
        manifest["tool"] = json{{"name", "mobgap"}, {"version", kToolVersion}};
        manifest["config"] = config_echo(cfg);
        manifest["seed"] = cfg.seed;
        manifest["threads_used"] = threads;
        manifest["inputs"] = std::move(input_digests);
        manifest["outputs"] = std::move(output_digests);
        manifest["stages"] = std::move(stages);
        mobgap::write_text_file(outdir / "manifest.json", manifest.dump(2) + "\n");
        outputs.commit();
        return 0;
    } catch (...) {
        outputs.discard_all();
        const std::string stage = clock.current().empty() ? "setup" : clock.current();
        // Rethrow with stage context, preserving the error class for the
        // exit-code mapping.
        try {
            throw;
        } catch (const mobgap::ValidationError& e) {
            throw mobgap::ValidationError("[" + stage + "] " + e.what());
        } catch (const mobgap::IoError& e) {
            throw mobgap::IoError("[" + stage + "] " + e.what());
        } catch (const mobgap::ComputationError& e) {
            throw mobgap::ComputationError("[" + stage + "] " + e.what());
        } catch (const std::exception& e) {
            throw mobgap::ComputationError("[" + stage + "] " + e.what());
        }
    }
}

struct FlagOverrides {
    std::optional<std::string> config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> k;
    std::optional<std::string> k_range;
    std::optional<double> tau;
    std::optional<std::string> gamma;
    std::optional<std::string> weighted;
    std::optional<std::string> out;
    std::optional<std::string> strict;
    std::optional<unsigned> threads;
    std::optional<std::size_t> restarts;
    // Input path flags.
    std::optional<std::string> households, persons, trips, column_map, geography_map, thresholds,
        brackets, model, synth_spec;
    std::optional<std::size_t> synth_households;
    bool use_synth = false;
};

bool parse_bool_flag(const std::string& v, const char* flag) {
    if (v == "true" || v == "1" || v == "yes") {
        return true;
    }
    if (v == "false" || v == "0" || v == "no") {
        return false;
    }
    throw mobgap::ValidationError(std::string(flag) + " expects true or false");
}

RunConfig apply_overrides(const FlagOverrides& f, Command command) {
    RunConfig cfg;
    if (f.config) {
        cfg = config_from_json_file(*f.config);
    }
    if (f.seed) {
        cfg.seed = *f.seed;
    }
    if (f.threads) {
        cfg.threads = *f.threads;
    }
    if (f.out) {
        cfg.out = *f.out;
    }
    if (f.strict) {
        cfg.strict = parse_bool_flag(*f.strict, "--strict");
    }
    if (f.weighted) {
        cfg.weighted = parse_bool_flag(*f.weighted, "--weighted");
    }
    if (f.k && f.k_range) {
        throw mobgap::ValidationError("--k and --k-range are mutually exclusive");
    }
    if (f.k) {
        cfg.cluster.k = *f.k;
        cfg.cluster.k_range.reset();
    }
    if (f.k_range) {
        const auto pos = f.k_range->find("..");
        if (pos == std::string::npos) {
            throw mobgap::ValidationError("--k-range expects the form A..B");
        }
        const auto a = mobgap::csv::parse_int(f.k_range->substr(0, pos), "--k-range");
        const auto b = mobgap::csv::parse_int(f.k_range->substr(pos + 2), "--k-range");
        if (a < 1 || b < a) {
            throw mobgap::ValidationError("--k-range expects 1 <= A <= B");
        }
        cfg.cluster.k_range = std::make_pair(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
        cfg.cluster.k.reset();
    }
    if (f.tau) {
        cfg.cluster.tau = *f.tau;
    }
    if (f.gamma) {
        if (*f.gamma == "auto") {
            cfg.cluster.gamma.reset();
        } else {
            cfg.cluster.gamma = mobgap::csv::parse_double(*f.gamma, "--gamma");
        }
    }
    if (f.restarts) {
        cfg.cluster.restarts = *f.restarts;
    }
    if (f.households) {
        cfg.inputs.households = *f.households;
    }
    if (f.persons) {
        cfg.inputs.persons = *f.persons;
    }
    if (f.trips) {
        cfg.inputs.trips = *f.trips;
    }
    if (f.column_map) {
        cfg.inputs.column_map = *f.column_map;
    }
    if (f.geography_map) {
        cfg.inputs.geography_map = *f.geography_map;
    }
    if (f.thresholds) {
        cfg.inputs.thresholds = *f.thresholds;
    }
    if (f.brackets) {
        cfg.inputs.brackets = *f.brackets;
    }
    if (f.model) {
        cfg.inputs.model = *f.model;
    }
    if (f.use_synth || f.synth_spec || f.synth_households) {
        cfg.synth_mode = true;
    }
    if (f.synth_spec) {
        cfg.synth_spec_path = *f.synth_spec;
    }
    if (f.synth_households) {
        cfg.synth_households = *f.synth_households;
    }
    if (command == Command::synth) {
        cfg.synth_mode = true;
    }
    return cfg;
}

void add_common_flags(CLI::App* cmd, FlagOverrides& f) {
    cmd->add_option("--config", f.config, "JSON config file; flags override its values");
    cmd->add_option("--seed", f.seed, "random seed");
    cmd->add_option("--out", f.out, "output directory");
    cmd->add_option("--threads", f.threads, "worker threads (0 = hardware)");
    cmd->add_option("--strict", f.strict, "strict load mode: true|false");
}

void add_input_flags(CLI::App* cmd, FlagOverrides& f) {
    cmd->add_option("--households", f.households, "household CSV");
    cmd->add_option("--persons", f.persons, "person CSV");
    cmd->add_option("--trips", f.trips, "trip CSV");
    cmd->add_option("--column-map", f.column_map, "column map JSON (default: NHTS 2017 names)");
    cmd->add_option("--geography-map", f.geography_map, "region_code,nyc_flag CSV");
}

void add_cluster_flags(CLI::App* cmd, FlagOverrides& f) {
    cmd->add_option("--k", f.k, "fixed cluster count");
    cmd->add_option("--k-range", f.k_range, "sweep range A..B with elbow selection");
    cmd->add_option("--tau", f.tau, "elbow threshold on the relative dispersion drop");
    cmd->add_option("--gamma", f.gamma, "categorical weight, or 'auto'");
    cmd->add_option("--restarts", f.restarts, "number of seeded restarts");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Household mobility-gap analysis pipeline"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);

    FlagOverrides f;

    CLI::App* cmd_run = app.add_subcommand("run", "Full pipeline: ingest or synthesize, classify, "
                                                  "cluster, compute gaps, render reports");
    add_common_flags(cmd_run, f);
    add_input_flags(cmd_run, f);
    add_cluster_flags(cmd_run, f);
    cmd_run->add_option("--thresholds", f.thresholds, "income threshold table CSV");
    cmd_run->add_option("--brackets", f.brackets, "income bracket map CSV");
    cmd_run->add_option("--weighted", f.weighted, "apply survey weights: true|false");
    cmd_run->add_flag("--synth", f.use_synth, "synthesize inputs with the built-in default spec");
    cmd_run->add_option("--synth-spec", f.synth_spec, "survey spec JSON for synthesis");
    cmd_run->add_option("--synth-households", f.synth_households, "household count override");

    CLI::App* cmd_synth = app.add_subcommand("synth", "Generate a synthetic survey fixture");
    add_common_flags(cmd_synth, f);
    cmd_synth->add_option("--spec", f.synth_spec, "survey spec JSON (default: built-in 5-group spec)");
    cmd_synth->add_option("--households", f.synth_households, "household count override");
    cmd_synth->add_option("--thresholds", f.thresholds, "income threshold table CSV");
    cmd_synth->add_flag("--dump-spec", "print the built-in default spec as JSON and exit");

    CLI::App* cmd_cluster = app.add_subcommand("cluster", "Fit the cluster model on survey inputs");
    add_common_flags(cmd_cluster, f);
    add_input_flags(cmd_cluster, f);
    add_cluster_flags(cmd_cluster, f);

    CLI::App* cmd_gaps = app.add_subcommand("gaps", "Compute mobility gaps from a fitted model");
    add_common_flags(cmd_gaps, f);
    add_input_flags(cmd_gaps, f);
    cmd_gaps->add_option("--model", f.model, "model.json from a prior cluster run");
    cmd_gaps->add_option("--thresholds", f.thresholds, "income threshold table CSV");
    cmd_gaps->add_option("--brackets", f.brackets, "income bracket map CSV");
    cmd_gaps->add_option("--weighted", f.weighted, "apply survey weights: true|false");

    CLI::App* cmd_elbow = app.add_subcommand("elbow", "Sweep k and select the elbow");
    add_common_flags(cmd_elbow, f);
    add_input_flags(cmd_elbow, f);
    add_cluster_flags(cmd_elbow, f);

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_synth->parsed() && cmd_synth->count("--dump-spec") > 0) {
            std::cout << mobgap::survey_spec_to_json(mobgap::default_survey_spec());
            return 0;
        }
        Command command = Command::run;
        if (cmd_synth->parsed()) {
            command = Command::synth;
        } else if (cmd_cluster->parsed()) {
            command = Command::cluster;
        } else if (cmd_gaps->parsed()) {
            command = Command::gaps;
        } else if (cmd_elbow->parsed()) {
            command = Command::elbow;
        }
        return run_pipeline(command, apply_overrides(f, command));
    } catch (const mobgap::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const mobgap::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const mobgap::ComputationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitComputation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitComputation;
    }
}
