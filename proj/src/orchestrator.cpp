#include "mpcfl/orchestrator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "CLI11.hpp"

namespace mpcfl {

const char* mode_name(Mode m) {
    switch (m) {
        case Mode::Local: return "local";
        case Mode::Centralized: return "centralized";
        case Mode::Federated: return "federated";
    }
    return "unknown";
}

const char* topology_name(Topology t) {
    switch (t) {
        case Topology::P2p: return "p2p";
        case Topology::TwoPhase: return "two-phase";
        case Topology::Plaintext: return "plaintext";
    }
    return "unknown";
}

const char* scheme_name(SchemeKind k) {
    return k == SchemeKind::Additive ? "additive" : "shamir";
}

ModelSpec ExperimentConfig::model_spec() const {
    if (model == "simple") return ModelSpec::simple();
    if (model == "complex") return ModelSpec::complex();
    throw ConfigError("unknown model '" + model + "' (use simple or complex)");
}

void ExperimentConfig::validate() const {
    if (parties < 1) throw ConfigError("--parties must be >= 1");
    if (local_iters < 0) throw ConfigError("--local-iters must be >= 0");
    if (epochs < 1) throw ConfigError("--epochs must be >= 1");
    if (batch < 1) throw ConfigError("--batch must be >= 1");
    if (committee < 1) throw ConfigError("--committee must be >= 1");
    if (committee > parties) {
        throw ConfigError("--committee " + std::to_string(committee) +
                          " exceeds --parties " + std::to_string(parties));
    }
    if (rows_per_party < 2) throw ConfigError("--rows must be >= 2");
    if (max_rounds < 1) throw ConfigError("max_rounds must be >= 1");
    if (!(lr > 0.0)) throw ConfigError("--lr must be positive");
    (void)model_spec();
}

namespace {

struct LoadedData {
    std::vector<Dataset> party;
    Dataset held_out;
    bool has_held_out = false;
};

LoadedData load_data(const ExperimentConfig& cfg) {
    LoadedData out;
    if (cfg.data == "synthetic") {
        SyntheticConfig gen;
        gen.parties = cfg.parties;
        gen.rows_per_party = cfg.rows_per_party;
        gen.shift = cfg.shift;
        gen.seed = cfg.seed;
        auto data = gen_synthetic(gen);
        out.party = std::move(data.party_data);
        out.held_out = std::move(data.held_out);
        out.has_held_out = true;
        return out;
    }
    namespace fs = std::filesystem;
    const fs::path dir(cfg.data);
    for (int i = 1; i <= cfg.parties; ++i) {
        const fs::path file = dir / ("party_" + std::to_string(i) + ".csv");
        out.party.push_back(load_csv(file.string()));
    }
    const fs::path held = dir / "held_out.csv";
    if (fs::exists(held)) {
        out.held_out = load_csv(held.string());
        out.has_held_out = true;
    }
    return out;
}

Dataset pool(const std::vector<Dataset>& parts, const std::vector<int>& ids) {
    Eigen::Index rows = 0;
    for (int id : ids) rows += parts[static_cast<std::size_t>(id - 1)].rows();
    Dataset d;
    d.features.resize(rows, 121);
    d.labels.resize(rows);
    Eigen::Index at = 0;
    for (int id : ids) {
        const Dataset& p = parts[static_cast<std::size_t>(id - 1)];
        d.features.middleRows(at, p.rows()) = p.features;
        d.labels.segment(at, p.rows()) = p.labels;
        at += p.rows();
    }
    return d;
}

/// One round-robin rotation: who trains, what they are tested on.
struct Rotation {
    int index = 0;                 // folds into the seed derivation
    std::vector<int> cohort;       // original party ids, ascending
    const Dataset* test = nullptr;
};

std::vector<Rotation> plan_rotations(const ExperimentConfig& cfg, const LoadedData& data) {
    std::vector<Rotation> rotations;
    if (cfg.parties == 1) {
        if (!data.has_held_out) {
            throw ConfigError("a single-party run needs a held_out.csv for evaluation");
        }
        rotations.push_back(Rotation{0, {1}, &data.held_out});
        return rotations;
    }
    for (int r = 1; r <= cfg.parties; ++r) {
        Rotation rot;
        rot.index = r;
        rot.test = &data.party[static_cast<std::size_t>(r - 1)];
        for (int i = 1; i <= cfg.parties; ++i) {
            if (i != r) rot.cohort.push_back(i);
        }
        rotations.push_back(std::move(rot));
    }
    return rotations;
}

ModelTensor cohort_init(const ModelSpec& spec, std::uint64_t rot_seed, int sim_id) {
    RngStream rng(rot_seed, static_cast<std::uint64_t>(sim_id), rng_tag::kModelInit);
    return init_model(spec, rng);
}

MetricSummary summarize(const std::vector<double>& values) {
    MetricSummary s;
    s.count = static_cast<int>(values.size());
    if (values.empty()) return s;
    s.mean = 0.0;
    s.max = -std::numeric_limits<double>::infinity();
    s.min = std::numeric_limits<double>::infinity();
    for (double v : values) {
        s.mean += v;
        s.max = std::max(s.max, v);
        s.min = std::min(s.min, v);
    }
    s.mean /= static_cast<double>(values.size());
    return s;
}

struct MetricsAccumulator {
    std::vector<double> recall, precision, balanced;

    void add(const Metrics& m) {
        recall.push_back(m.recall);
        precision.push_back(m.precision);
        balanced.push_back(m.balanced);
    }
};

struct FederatedOutcome {
    ModelTensor global;
    NetworkStats stats;
    int election_rounds = 0;
    std::string delivery_log;
};

FederatedOutcome run_federated_cohort(const ExperimentConfig& cfg,
                                      const std::vector<Dataset>& party_data,
                                      const std::vector<int>& cohort,
                                      std::uint64_t rot_seed, int t_iters) {
    const int k = static_cast<int>(cohort.size());
    const ModelSpec spec = cfg.model_spec();

    SimNetwork net(k);
    const FieldParams field = FieldParams::default61();
    const SharingScheme scheme = cfg.scheme == SchemeKind::Additive
                                     ? SharingScheme::additive(k)
                                     : SharingScheme::shamir(k, k - 1);
    ProtocolContext ctx{net, field, scheme, rot_seed};

    std::vector<FlParty> parties;
    parties.reserve(cohort.size());
    for (int sim_id = 1; sim_id <= k; ++sim_id) {
        FlParty p;
        p.id = PartyId{sim_id};
        p.model = cohort_init(spec, rot_seed, sim_id);
        if (!party_data.empty()) {
            p.data = party_data[static_cast<std::size_t>(cohort[static_cast<std::size_t>(sim_id - 1)] - 1)];
        }
        parties.push_back(std::move(p));
    }

    Committee committee;
    if (k > 1 && cfg.topology == Topology::TwoPhase) {
        if (cfg.committee > k) {
            throw ConfigError("committee size " + std::to_string(cfg.committee) +
                              " exceeds the cohort of " + std::to_string(k));
        }
        committee = elect_committee(ctx, ElectionConfig{cfg.committee, cfg.batch,
                                                        cfg.max_rounds});
    }

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        federated_round(ctx, parties, cfg.topology,
                        committee.size() > 0 ? &committee : nullptr, t_iters, cfg.lr,
                        epoch);
    }

    FederatedOutcome out;
    out.global = parties.front().model;
    out.stats = net.stats_snapshot();
    const std::uint64_t election_msgs = out.stats.num(Phase::Election);
    const std::uint64_t per_round = 2ull * static_cast<std::uint64_t>(k) *
                                    static_cast<std::uint64_t>(k - 1);
    out.election_rounds =
        per_round > 0 ? static_cast<int>(election_msgs / per_round) : 0;
    out.delivery_log = net.delivery_log_text();
    if (net.unconsumed_count() != 0) {
        throw ProtocolError("simulation finished with unread envelopes");
    }
    return out;
}

}  // namespace

CostPair predict_costs(Topology topology, const CostInputs& in) {
    switch (topology) {
        case Topology::P2p: {
            const CostBreakdown c = p2p_cost(in);
            return {c, c};
        }
        case Topology::TwoPhase:
            return {two_phase_cost(in, ExchangeVariant::Paper),
                    two_phase_cost(in, ExchangeVariant::Trace)};
        case Topology::Plaintext: {
            const CostBreakdown c = plaintext_cost(in);
            return {c, c};
        }
    }
    throw ConfigError("unknown topology");
}

Report run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();

    const LoadedData data = load_data(cfg);
    if (static_cast<int>(data.party.size()) != cfg.parties) {
        throw ConfigError("expected " + std::to_string(cfg.parties) + " party datasets");
    }
    const auto rotations = plan_rotations(cfg, data);
    const ModelSpec spec = cfg.model_spec();
    const int tot_iters = cfg.local_iters * cfg.epochs;

    Report report;
    report.config = cfg;
    report.rotations = static_cast<int>(rotations.size());

    MetricsAccumulator acc;
    bool first_sim = true;

    for (const auto& rot : rotations) {
        const std::uint64_t rot_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(rot.index));
        switch (cfg.mode) {
            case Mode::Local: {
                for (std::size_t c = 0; c < rot.cohort.size(); ++c) {
                    ModelTensor model = cohort_init(spec, rot_seed, static_cast<int>(c) + 1);
                    const Dataset& own =
                        data.party[static_cast<std::size_t>(rot.cohort[c] - 1)];
                    model = local_train(std::move(model), own, tot_iters, cfg.lr);
                    acc.add(compute_metrics(model, *rot.test));
                }
                break;
            }
            case Mode::Centralized: {
                ModelTensor model = cohort_init(spec, rot_seed, 0);
                const Dataset pooled = pool(data.party, rot.cohort);
                model = local_train(std::move(model), pooled, tot_iters, cfg.lr);
                acc.add(compute_metrics(model, *rot.test));
                break;
            }
            case Mode::Federated: {
                FederatedOutcome out = run_federated_cohort(cfg, data.party, rot.cohort,
                                                            rot_seed, cfg.local_iters);
                acc.add(compute_metrics(out.global, *rot.test));
                report.election_rounds.push_back(out.election_rounds);
                report.delivery_log += out.delivery_log;
                ++report.simulations;
                if (first_sim) {
                    report.measured = out.stats;
                    report.cohort_parties = static_cast<int>(rot.cohort.size());
                    first_sim = false;
                } else if (out.stats != report.measured) {
                    report.rotations_identical = false;
                }
                break;
            }
        }
    }

    report.recall = summarize(acc.recall);
    report.precision = summarize(acc.precision);
    report.balanced = summarize(acc.balanced);

    if (cfg.mode == Mode::Federated && report.cohort_parties >= 2) {
        const CostInputs in{static_cast<std::uint64_t>(report.cohort_parties),
                            static_cast<std::uint64_t>(cfg.epochs),
                            static_cast<std::uint64_t>(cfg.local_iters),
                            static_cast<std::uint64_t>(cfg.committee),
                            static_cast<std::uint64_t>(cfg.batch),
                            static_cast<std::uint64_t>(spec.param_count())};
        const CostPair predicted = predict_costs(cfg.topology, in);
        report.predicted_paper = predicted.paper;
        report.predicted_trace = predicted.trace;
        report.cost_match_trace =
            report.rotations_identical &&
            report.measured.total_msg_num() == predicted.trace.msg_num &&
            report.measured.total_msg_size() == predicted.trace.msg_size;
        report.delta_paper_msg_num =
            static_cast<long long>(report.measured.total_msg_num()) -
            static_cast<long long>(predicted.paper.msg_num);
        report.delta_paper_msg_size =
            static_cast<long long>(report.measured.total_msg_size()) -
            static_cast<long long>(predicted.paper.msg_size);
    }

    const auto t1 = std::chrono::steady_clock::now();
    report.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();

    if (!cfg.out.empty()) {
        std::ofstream os(cfg.out);
        if (!os) throw ConfigError("cannot write report to " + cfg.out);
        os << report_json_text(report) << '\n';
    }
    if (!cfg.log.empty()) {
        std::ofstream os(cfg.log);
        if (!os) throw ConfigError("cannot write delivery log to " + cfg.log);
        os << report.delivery_log;
    }
    return report;
}

namespace {

nlohmann::ordered_json summary_json(const MetricSummary& s) {
    auto num = [](double v) -> nlohmann::ordered_json {
        if (std::isnan(v)) return nullptr;
        return v;
    };
    return {{"mean", num(s.mean)}, {"max", num(s.max)}, {"min", num(s.min)},
            {"count", s.count}};
}

nlohmann::ordered_json stats_json(const NetworkStats& stats) {
    nlohmann::ordered_json per_phase;
    for (int p = 0; p < kPhaseCount; ++p) {
        per_phase[phase_name(static_cast<Phase>(p))] = {
            {"msg_num", stats.msg_num[static_cast<std::size_t>(p)]},
            {"msg_size", stats.msg_size[static_cast<std::size_t>(p)]}};
    }
    return {{"per_phase", per_phase},
            {"total",
             {{"msg_num", stats.total_msg_num()}, {"msg_size", stats.total_msg_size()}}}};
}

nlohmann::ordered_json cost_json(const CostBreakdown& c) {
    return {{"msg_num", c.msg_num}, {"msg_size", c.msg_size}};
}

}  // namespace

nlohmann::ordered_json report_to_json(const Report& report) {
    const ExperimentConfig& cfg = report.config;
    nlohmann::ordered_json j;
    j["config"] = {{"parties", cfg.parties},
                   {"local_iters", cfg.local_iters},
                   {"epochs", cfg.epochs},
                   {"committee", cfg.committee},
                   {"batch", cfg.batch},
                   {"scheme", scheme_name(cfg.scheme)},
                   {"topology", topology_name(cfg.topology)},
                   {"model", cfg.model},
                   {"mode", mode_name(cfg.mode)},
                   {"seed", cfg.seed},
                   {"data", cfg.data},
                   {"rows_per_party", cfg.rows_per_party},
                   {"shift", cfg.shift},
                   {"lr", cfg.lr},
                   {"max_rounds", cfg.max_rounds}};
    j["rotations"] = report.rotations;
    j["metrics"] = {{"recall", summary_json(report.recall)},
                    {"precision", summary_json(report.precision)},
                    {"balanced", summary_json(report.balanced)}};
    j["network"] = {{"cohort_parties", report.cohort_parties},
                    {"simulations", report.simulations},
                    {"election_rounds", report.election_rounds},
                    {"rotations_identical", report.rotations_identical},
                    {"measured", stats_json(report.measured)},
                    {"predicted_paper", cost_json(report.predicted_paper)},
                    {"predicted_trace", cost_json(report.predicted_trace)},
                    {"match_trace", report.cost_match_trace},
                    {"delta_vs_paper",
                     {{"msg_num", report.delta_paper_msg_num},
                      {"msg_size", report.delta_paper_msg_size}}}};
    j["wall_ms"] = report.wall_ms;
    return j;
}

std::string report_json_text(const Report& report, bool include_wall) {
    nlohmann::ordered_json j = report_to_json(report);
    if (!include_wall) j["wall_ms"] = 0.0;
    return j.dump(2);
}

SimOutcome simulate_costs(const ExperimentConfig& cfg) {
    cfg.validate();
    std::vector<int> cohort(static_cast<std::size_t>(cfg.parties));
    for (int i = 1; i <= cfg.parties; ++i) cohort[static_cast<std::size_t>(i - 1)] = i;
    FederatedOutcome out = run_federated_cohort(cfg, {}, cohort, cfg.seed, 0);
    return SimOutcome{out.stats, std::move(out.delivery_log), out.election_rounds};
}

std::string run_matrix(const std::vector<ExperimentConfig>& cfgs, bool train) {
    std::ostringstream csv;
    csv << "n,topology,scheme,msg_num_measured,msg_num_paper,msg_num_trace,"
           "msg_size_measured,msg_size_paper,msg_size_trace,balanced_mean,error\n";
    for (const ExperimentConfig& cfg : cfgs) {
        csv << cfg.parties << ',' << topology_name(cfg.topology) << ','
            << scheme_name(cfg.scheme) << ',';
        try {
            std::ostringstream row;
            const SimOutcome sim = simulate_costs(cfg);
            const CostInputs in{static_cast<std::uint64_t>(cfg.parties),
                                static_cast<std::uint64_t>(cfg.epochs),
                                static_cast<std::uint64_t>(cfg.local_iters),
                                static_cast<std::uint64_t>(cfg.committee),
                                static_cast<std::uint64_t>(cfg.batch),
                                static_cast<std::uint64_t>(cfg.model_spec().param_count())};
            const CostPair predicted = predict_costs(cfg.topology, in);
            row << sim.stats.total_msg_num() << ',' << predicted.paper.msg_num << ','
                << predicted.trace.msg_num << ',' << sim.stats.total_msg_size() << ','
                << predicted.paper.msg_size << ',' << predicted.trace.msg_size << ',';
            if (train) {
                ExperimentConfig fed = cfg;
                fed.mode = Mode::Federated;
                fed.out.clear();
                fed.log.clear();
                const Report report = run_experiment(fed);
                row << report.balanced.mean;
            }
            csv << row.str() << ",\n";
        } catch (const std::exception& e) {
            std::string msg = e.what();
            std::replace(msg.begin(), msg.end(), ',', ';');
            std::replace(msg.begin(), msg.end(), '\n', ' ');
            csv << ",,,,,,," << msg << '\n';
        }
    }
    return csv.str();
}

std::string costs_table(const std::vector<int>& n_values, const CostInputs& base) {
    std::ostringstream csv;
    csv << "n,topology,variant,msg_num,msg_size\n";
    for (int n : n_values) {
        CostInputs in = base;
        in.n = static_cast<std::uint64_t>(n);
        const CostBreakdown p2p = p2p_cost(in);
        csv << n << ",p2p,-," << p2p.msg_num << ',' << p2p.msg_size << '\n';
        const CostBreakdown paper = two_phase_cost(in, ExchangeVariant::Paper);
        csv << n << ",two-phase,paper," << paper.msg_num << ',' << paper.msg_size << '\n';
        const CostBreakdown trace = two_phase_cost(in, ExchangeVariant::Trace);
        csv << n << ",two-phase,trace," << trace.msg_num << ',' << trace.msg_size << '\n';
        const CostBreakdown plain = plaintext_cost(in);
        csv << n << ",plaintext,-," << plain.msg_num << ',' << plain.msg_size << '\n';
    }
    return csv.str();
}

ExperimentConfig parse_cli(const std::vector<std::string>& args) {
    ExperimentConfig cfg;
    CLI::App app{"privacy-preserving federated aggregation experiment"};
    app.add_option("--parties", cfg.parties, "number of parties");
    app.add_option("--local-iters", cfg.local_iters, "local iterations per epoch");
    app.add_option("--epochs", cfg.epochs, "global epochs");
    app.add_option("--committee", cfg.committee, "committee size");
    app.add_option("--batch", cfg.batch, "votes per election round");
    std::string scheme = "additive";
    app.add_option("--scheme", scheme, "additive|shamir");
    std::string topology = "two-phase";
    app.add_option("--topology", topology, "p2p|two-phase|plaintext");
    app.add_option("--model", cfg.model, "simple|complex");
    std::string mode = "federated";
    app.add_option("--mode", mode, "local|centralized|federated");
    app.add_option("--seed", cfg.seed, "master seed");
    app.add_option("--data", cfg.data, "'synthetic' or a directory of party_<i>.csv");
    app.add_option("--rows", cfg.rows_per_party, "synthetic rows per party");
    app.add_option("--shift", cfg.shift, "synthetic per-party mean shift");
    app.add_option("--lr", cfg.lr, "learning rate");
    app.add_option("--out", cfg.out, "report JSON path");
    app.add_option("--log", cfg.log, "delivery log path");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        throw ConfigError(app.help());
    } catch (const CLI::ParseError& e) {
        throw ConfigError(std::string("usage error: ") + e.what());
    }

    if (scheme == "additive") cfg.scheme = SchemeKind::Additive;
    else if (scheme == "shamir") cfg.scheme = SchemeKind::Shamir;
    else throw ConfigError("unknown scheme '" + scheme + "'");

    if (topology == "p2p") cfg.topology = Topology::P2p;
    else if (topology == "two-phase") cfg.topology = Topology::TwoPhase;
    else if (topology == "plaintext") cfg.topology = Topology::Plaintext;
    else throw ConfigError("unknown topology '" + topology + "'");

    if (mode == "local") cfg.mode = Mode::Local;
    else if (mode == "centralized") cfg.mode = Mode::Centralized;
    else if (mode == "federated") cfg.mode = Mode::Federated;
    else throw ConfigError("unknown mode '" + mode + "'");

    cfg.validate();
    return cfg;
}

}  // namespace mpcfl
