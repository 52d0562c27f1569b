#pragma once

#include <string>
#include <vector>

#include "mpcfl/cost_model.hpp"
#include "mpcfl/protocols.hpp"

#include "json.hpp"

namespace mpcfl {

enum class Mode { Local, Centralized, Federated };

const char* mode_name(Mode m);
const char* topology_name(Topology t);
const char* scheme_name(SchemeKind k);

/// Full description of one experiment. Defaults follow the standard setup:
/// four parties, three local iterations, fifteen epochs, committee of
/// three elected with batches of ten votes, additive sharing over the
/// two-phase topology, plain model, synthetic data.
struct ExperimentConfig {
    int parties = 4;
    int local_iters = 3;
    int epochs = 15;
    int committee = 3;
    int batch = 10;
    SchemeKind scheme = SchemeKind::Additive;
    Topology topology = Topology::TwoPhase;
    std::string model = "simple";  // "simple" | "complex"
    Mode mode = Mode::Federated;
    std::uint64_t seed = 1;
    std::string data = "synthetic";  // "synthetic" or a directory of party_<i>.csv
    Eigen::Index rows_per_party = 200;
    double shift = 1.0;
    double lr = 0.05;
    int max_rounds = 16;
    std::string out;  // report JSON path, optional
    std::string log;  // delivery log path, optional

    void validate() const;
    ModelSpec model_spec() const;
};

struct MetricSummary {
    double mean = 0.0;
    double max = 0.0;
    double min = 0.0;
    int count = 0;
};

struct Report {
    ExperimentConfig config;
    MetricSummary recall;
    MetricSummary precision;
    MetricSummary balanced;
    int rotations = 0;

    // Message accounting. Every federated simulation in this run has
    // cohort_parties participants (the round-robin cohort); the analytic
    // predictions are evaluated at that size. `measured` is the counters of
    // one simulation, asserted identical across rotations.
    int cohort_parties = 0;
    int simulations = 0;
    std::vector<int> election_rounds;
    bool rotations_identical = true;
    NetworkStats measured;
    CostBreakdown predicted_paper;
    CostBreakdown predicted_trace;
    bool cost_match_trace = true;
    long long delta_paper_msg_num = 0;   // measured - paper prediction
    long long delta_paper_msg_size = 0;

    double wall_ms = 0.0;
    std::string delivery_log;  // concatenated rotation logs, not in the JSON
};

/// Runs one experiment: local and centralized training or the federated
/// simulation, with round-robin held-out evaluation (train on n-1 party
/// datasets, test on the remaining one, rotating). Persists the report to
/// cfg.out and the delivery log to cfg.log when set.
Report run_experiment(const ExperimentConfig& cfg);

nlohmann::ordered_json report_to_json(const Report& report);
/// Serialized report; with include_wall = false the wall-time field is
/// pinned to zero so reruns compare byte-identical.
std::string report_json_text(const Report& report, bool include_wall = true);

/// Analytic predictions for one topology at the given inputs.
struct CostPair {
    CostBreakdown paper;
    CostBreakdown trace;
};
CostPair predict_costs(Topology topology, const CostInputs& in);

/// Cost-focused simulation at the full cohort of cfg.parties: election
/// (two-phase only) plus cfg.epochs aggregation epochs, no local training.
struct SimOutcome {
    NetworkStats stats;
    std::string delivery_log;
    int election_rounds = 0;
};
SimOutcome simulate_costs(const ExperimentConfig& cfg);

/// One CSV row per config: measured counters from a full-cohort
/// simulation, both analytic predictions, and (with train = true) the
/// round-robin federated balanced accuracy. Failures are recorded in the
/// final column and the sweep continues.
std::string run_matrix(const std::vector<ExperimentConfig>& cfgs, bool train);

/// Closed-form cost table over a party range for plotting.
std::string costs_table(const std::vector<int>& n_values, const CostInputs& base);

/// Parses run-style flags into a config; throws ConfigError on unknown
/// flags or invalid combinations.
ExperimentConfig parse_cli(const std::vector<std::string>& args);

}  // namespace mpcfl
