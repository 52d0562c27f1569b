#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mpcfl/orchestrator.hpp"

namespace {

using namespace mpcfl;

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) values.push_back(std::stoi(item));
    }
    return values;
}

Topology topology_from(const std::string& name) {
    if (name == "p2p") return Topology::P2p;
    if (name == "two-phase") return Topology::TwoPhase;
    if (name == "plaintext") return Topology::Plaintext;
    throw ConfigError("unknown topology '" + name + "'");
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot write " + path);
    os << text;
}

int cmd_run(const std::vector<std::string>& args) {
    const ExperimentConfig cfg = parse_cli(args);
    const Report report = run_experiment(cfg);
    std::cout << report_json_text(report) << '\n';
    if (!cfg.out.empty()) std::cerr << "report written to " << cfg.out << '\n';
    if (!cfg.log.empty()) std::cerr << "delivery log written to " << cfg.log << '\n';
    return 0;
}

int cmd_sweep(std::vector<std::string> args) {
    CLI::App app{"sweep message counts (and optionally accuracy) over n and topology"};
    std::string parties = "4,8,16,32";
    std::string topologies = "p2p,two-phase";
    bool no_train = false;
    std::string out;
    ExperimentConfig base;
    app.add_option("--parties", parties, "comma-separated party counts");
    app.add_option("--topologies", topologies, "comma-separated topologies");
    app.add_flag("--no-train", no_train, "simulation only, skip accuracy runs");
    app.add_option("--epochs", base.epochs, "global epochs");
    app.add_option("--local-iters", base.local_iters, "local iterations per epoch");
    app.add_option("--committee", base.committee, "committee size");
    app.add_option("--batch", base.batch, "votes per election round");
    std::string scheme = "additive";
    app.add_option("--scheme", scheme, "additive|shamir");
    app.add_option("--model", base.model, "simple|complex");
    app.add_option("--seed", base.seed, "master seed");
    app.add_option("--rows", base.rows_per_party, "synthetic rows per party");
    app.add_option("--shift", base.shift, "synthetic per-party mean shift");
    app.add_option("--out", out, "CSV path ('-' for stdout)");
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        throw ConfigError(std::string("usage error: ") + e.what());
    }
    if (scheme == "shamir") base.scheme = SchemeKind::Shamir;
    else if (scheme != "additive") throw ConfigError("unknown scheme '" + scheme + "'");

    std::vector<ExperimentConfig> cfgs;
    std::stringstream ts(topologies);
    std::string topo;
    while (std::getline(ts, topo, ',')) {
        for (int n : parse_int_list(parties)) {
            ExperimentConfig cfg = base;
            cfg.parties = n;
            cfg.topology = topology_from(topo);
            cfgs.push_back(cfg);
        }
    }
    write_text(out, run_matrix(cfgs, !no_train));
    return 0;
}

int cmd_costs(std::vector<std::string> args) {
    CLI::App app{"closed-form message cost table over a party range"};
    int n_min = 4, n_max = 128, n_step = 0;
    CostInputs base{0, 15, 3, 3, 10, 242};
    std::string model = "simple";
    std::string out;
    app.add_option("--n-min", n_min, "smallest party count");
    app.add_option("--n-max", n_max, "largest party count");
    app.add_option("--n-step", n_step, "additive step (default: doubling)");
    app.add_option("--epochs", base.e, "global epochs");
    app.add_option("--local-iters", base.t, "local iterations (reporting only)");
    app.add_option("--committee", base.m, "committee size");
    app.add_option("--batch", base.b, "votes per election round");
    app.add_option("--model", model, "simple|complex (sets s)");
    app.add_option("--out", out, "CSV path ('-' for stdout)");
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        throw ConfigError(std::string("usage error: ") + e.what());
    }
    if (model == "simple") base.s = static_cast<std::uint64_t>(ModelSpec::simple().param_count());
    else if (model == "complex") base.s = static_cast<std::uint64_t>(ModelSpec::complex().param_count());
    else throw ConfigError("unknown model '" + model + "'");

    std::vector<int> n_values;
    if (n_step > 0) {
        for (int n = n_min; n <= n_max; n += n_step) n_values.push_back(n);
    } else {
        for (int n = n_min; n <= n_max; n *= 2) n_values.push_back(n);
    }
    write_text(out, costs_table(n_values, base));
    return 0;
}

int cmd_gen_data(std::vector<std::string> args) {
    CLI::App app{"write synthetic party datasets as CSV"};
    SyntheticConfig cfg;
    std::string out = "data";
    app.add_option("--parties", cfg.parties, "number of parties");
    app.add_option("--rows", cfg.rows_per_party, "rows per party");
    app.add_option("--shift", cfg.shift, "per-party mean shift");
    app.add_option("--seed", cfg.seed, "generator seed");
    app.add_option("--held-out-rows", cfg.held_out_rows, "rows in held_out.csv");
    app.add_option("--out", out, "output directory");
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        throw ConfigError(std::string("usage error: ") + e.what());
    }
    std::filesystem::create_directories(out);
    const SyntheticData data = gen_synthetic(cfg);
    for (std::size_t i = 0; i < data.party_data.size(); ++i) {
        const std::string path = out + "/party_" + std::to_string(i + 1) + ".csv";
        write_csv(path, data.party_data[i]);
    }
    write_csv(out + "/held_out.csv", data.held_out);
    std::cerr << "wrote " << data.party_data.size() << " party files and held_out.csv to "
              << out << '\n';
    return 0;
}

void print_usage() {
    std::cout <<
        "usage: mpcfl <command> [flags]\n"
        "\n"
        "commands:\n"
        "  run       one experiment (local | centralized | federated); prints a JSON report\n"
        "  sweep     message counts vs. party count, CSV (add --no-train for simulation only)\n"
        "  costs     closed-form cost table over a party range, CSV\n"
        "  gen-data  write synthetic party datasets as CSV\n"
        "\n"
        "run flags: --parties --local-iters --epochs --committee --batch\n"
        "           --scheme {additive|shamir} --topology {p2p|two-phase|plaintext}\n"
        "           --model {simple|complex} --mode {local|centralized|federated}\n"
        "           --seed --data {synthetic|<csv-dir>} --rows --shift --lr --out --log\n"
        "\n"
        "run `mpcfl <command> --help` for the full flag list of a command.\n";
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    if (args.empty() || args[0] == "--help" || args[0] == "-h" || args[0] == "help") {
        print_usage();
        return args.empty() ? 1 : 0;
    }
    const std::string cmd = args[0];
    const std::vector<std::string> rest(args.begin() + 1, args.end());
    try {
        if (cmd == "run") return cmd_run(rest);
        if (cmd == "sweep") return cmd_sweep(rest);
        if (cmd == "costs") return cmd_costs(rest);
        if (cmd == "gen-data") return cmd_gen_data(rest);
        std::cerr << "unknown command '" << cmd << "'\n\n";
        print_usage();
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
