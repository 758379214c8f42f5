// Copyright 2026 The dgten Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dgten_cli/cli.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "dgten/adversarial.hpp"
#include "dgten/errors.hpp"
#include "dgten/gradcheck.hpp"
#include "dgten/graph.hpp"
#include "dgten/log.hpp"
#include "dgten/protocol.hpp"
#include "dgten/uncertainty.hpp"
#include "dgten_cli/plot.hpp"

namespace dgten::cli {
namespace {

constexpr double kGradTolerance = 1e-4;

struct ConfigFlags {
    std::string preset;
    std::string file;
    std::vector<std::string> overrides;
    std::vector<std::uint64_t> seeds;

    void attach(CLI::App* app) {
        app->add_option("--preset", preset, "Dataset preset (otc or alpha)");
        app->add_option("--config", file, "Config file (key=value lines or JSON)");
        app->add_option("--set", overrides, "Override one config key, key=value (repeatable)");
        app->add_option("--seeds", seeds, "Training seeds (default: the config seed)")->delimiter(',');
    }

    TrainConfig resolve() const {
        TrainConfig c = file.empty() ? TrainConfig{} : TrainConfig::load(file);
        if (!preset.empty()) c.apply_preset(preset);
        for (const auto& kv : overrides) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
            c.set(kv.substr(0, eq), kv.substr(eq + 1));
        }
        c.validate();
        return c;
    }

    std::vector<std::uint64_t> resolved_seeds(const TrainConfig& c) const {
        return seeds.empty() ? std::vector<std::uint64_t>{c.seed} : seeds;
    }
};

struct AttackFlags {
    std::string kind;
    double fraction = 0.10;
    std::uint64_t seed = 1;
    std::size_t phase_origin = 0;

    std::optional<AttackSpec> spec() const {
        if (kind.empty()) return std::nullopt;
        AttackSpec s;
        s.kind = parse_attack_kind(kind);
        s.victim_fraction = fraction;
        s.seed = seed;
        s.phase_origin = phase_origin;
        return s;
    }
};

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << text;
    if (!text.empty() && text.back() != '\n') out << '\n';
}

std::string stats_line(const SequenceStats& s) {
    std::ostringstream o;
    o << s.nodes << " nodes, " << s.edges << " edges (" << s.trust_edges << " trust, " << s.distrust_edges
      << " distrust)";
    return o.str();
}

void print_aggregate(const EvalReport& report, std::ostream& out) {
    out << "task " << report.task << ": " << report.rounds.size() << " scored rounds, " << report.skipped.size()
        << " skipped\n";
    out << std::fixed << std::setprecision(4);
    for (const auto& [name, ms] : report.aggregate()) out << "  " << std::left << std::setw(9) << name << ms.mean << " +- " << ms.sd << '\n';
    out.unsetf(std::ios::floatfield);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Dynamic trust evaluation on signed snapshot graphs", "dgten"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for every subcommand");

    // ingest
    std::string ingest_input, ingest_out;
    std::size_t ingest_slots = 10;
    bool ingest_header = false;
    auto* ingest = app.add_subcommand("ingest", "Parse an edge list and cut it into snapshots");
    ingest->add_option("--input", ingest_input, "CSV file SOURCE,TARGET,RATING,TIME")->required();
    ingest->add_option("--snapshots", ingest_slots, "Number of equal-duration slots")->required();
    ingest->add_option("--out", ingest_out, "Output sequence file (JSON)")->required();
    ingest->add_flag("--header", ingest_header, "Skip the first row");

    // attack
    std::string attack_in, attack_out, attack_provenance;
    AttackFlags attack_flags;
    long long attack_slot = -1;
    auto* attack = app.add_subcommand("attack", "Inject adversarial ratings into a sequence");
    attack->add_option("--in", attack_in, "Input sequence")->required();
    attack->add_option("--kind", attack_flags.kind, "good-mouthing, bad-mouthing or on-off")
        ->required()
        ->check(CLI::IsMember({"good-mouthing", "bad-mouthing", "on-off"}));
    attack->add_option("--fraction", attack_flags.fraction, "Victim fraction");
    attack->add_option("--seed", attack_flags.seed, "Attack seed");
    attack->add_option("--phase-origin", attack_flags.phase_origin, "First on-slot of an on-off attack (0-based)");
    attack->add_option("--slot", attack_slot, "Target slot of a static attack (0-based, default last)");
    attack->add_option("--out", attack_out, "Output sequence")->required();
    attack->add_option("--provenance", attack_provenance, "Injected-edge sidecar (default <out>.attack.json)");

    // train
    std::string train_in, train_out;
    int train_task = 1;
    ConfigFlags train_cfg;
    AttackFlags train_attack;
    auto* train_cmd = app.add_subcommand("train", "Run the expanding-window protocol and keep the last model");
    train_cmd->add_option("--in", train_in, "Input sequence")->required();
    train_cmd->add_option("--task", train_task, "Task 1, 2 or 3")->check(CLI::Range(1, 3));
    train_cmd->add_option("--out", train_out, "Output directory for model.json and report.json")->required();
    train_cfg.attach(train_cmd);
    train_cmd->add_option("--attack", train_attack.kind, "Attack each training window")
        ->check(CLI::IsMember({"good-mouthing", "bad-mouthing", "on-off"}));
    train_cmd->add_option("--attack-fraction", train_attack.fraction, "Victim fraction of the attack");
    train_cmd->add_option("--attack-seed", train_attack.seed, "Attack seed");

    // evaluate
    std::string eval_in, eval_model, eval_report;
    int eval_task = 1;
    ConfigFlags eval_cfg;
    AttackFlags eval_attack;
    auto* evaluate_cmd = app.add_subcommand("evaluate", "Score a saved model, or run the full protocol without one");
    evaluate_cmd->add_option("--in", eval_in, "Input sequence")->required();
    evaluate_cmd->add_option("--model", eval_model, "Saved model; omit to train every round");
    evaluate_cmd->add_option("--task", eval_task, "Task 1, 2 or 3")->check(CLI::Range(1, 3));
    evaluate_cmd->add_option("--report", eval_report, "Report file (JSON)")->required();
    eval_cfg.attach(evaluate_cmd);
    evaluate_cmd->add_option("--attack", eval_attack.kind, "Attack each training window")
        ->check(CLI::IsMember({"good-mouthing", "bad-mouthing", "on-off"}));
    evaluate_cmd->add_option("--attack-fraction", eval_attack.fraction, "Victim fraction of the attack");
    evaluate_cmd->add_option("--attack-seed", eval_attack.seed, "Attack seed");

    // gradcheck
    std::string gc_fixture = "all";
    std::size_t gc_coords = 16;
    auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference gradient check on the fixture model");
    gradcheck->add_option("--fixture", gc_fixture, "Fixture name or 'all'");
    gradcheck->add_option("--coords", gc_coords, "Coordinates sampled per tensor");

    // export-uncertainty
    std::string ex_model, ex_in, ex_out;
    double ex_threshold = 0.0;
    int ex_clusters = 3;
    std::size_t ex_top = 10;
    std::uint64_t ex_seed = 1;
    auto* export_cmd = app.add_subcommand("export-uncertainty", "Write sigma fingerprints, watchlist and clusters");
    export_cmd->add_option("--model", ex_model, "Saved model")->required();
    export_cmd->add_option("--in", ex_in, "Sequence the model was trained on")->required();
    export_cmd->add_option("--threshold", ex_threshold, "Watchlist threshold on mean sigma")->required();
    export_cmd->add_option("--out", ex_out, "Output directory")->required();
    export_cmd->add_option("--clusters", ex_clusters, "k for k-means (0 disables)");
    export_cmd->add_option("--top", ex_top, "Top-k nodes by mean sigma");
    export_cmd->add_option("--seed", ex_seed, "k-means seed");

    // plot
    std::string plot_report, plot_out;
    auto* plot = app.add_subcommand("plot", "Write plot data, a gnuplot script and an SVG chart for a report");
    plot->add_option("--report", plot_report, "Report file")->required();
    plot->add_option("--out", plot_out, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e, out, err);
            return 0;
        }
        err << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    }

    auto progress = [&err](const std::string& msg) { err << msg << '\n'; };

    try {
        if (*ingest) {
            const EdgeList records = load_edge_list(ingest_input, CsvOptions{ingest_header});
            const SnapshotSequence seq = discretize(records, ingest_slots);
            save_sequence(seq, ingest_out);
            out << "records: " << stats_line(record_stats(records)) << '\n';
            out << "snapshots: " << seq.size() << ", " << stats_line(sequence_stats(seq)) << '\n';
            try {
                out << "edge homophily: " << std::fixed << std::setprecision(4) << edge_homophily(seq) << '\n';
                out.unsetf(std::ios::floatfield);
            } catch (const UndefinedMetricError&) {
                out << "edge homophily: undefined (no edges)\n";
            }
        } else if (*attack) {
            const SnapshotSequence seq = load_sequence(attack_in);
            AttackSpec spec = *attack_flags.spec();
            spec.target_slot = attack_slot;
            const AttackResult result = apply_attack(seq, spec);
            save_sequence(result.sequence, attack_out);
            const std::string side = attack_provenance.empty() ? attack_out + ".attack.json" : attack_provenance;
            save_provenance(result, spec, seq, side);
            std::size_t victims = 0;
            for (const auto& v : result.victims) victims += v.second.size();
            out << to_string(spec.kind) << ": " << victims << " victims, " << result.injected.size()
                << " injected edges; provenance in " << side << '\n';
        } else if (*train_cmd) {
            const SnapshotSequence seq = load_sequence(train_in);
            const TrainConfig cfg = train_cfg.resolve();
            EvaluateOptions opts;
            opts.task = train_task;
            opts.seeds = train_cfg.resolved_seeds(cfg);
            opts.attack = train_attack.spec();
            opts.progress = progress;
            std::optional<Model> last;
            const EvalReport report = evaluate(seq, cfg, opts, &last);
            std::filesystem::create_directories(train_out);
            write_text(std::filesystem::path(train_out) / "report.json", report.to_json());
            if (last) last->save(std::filesystem::path(train_out) / "model.json");
            print_aggregate(report, out);
        } else if (*evaluate_cmd) {
            const SnapshotSequence seq = load_sequence(eval_in);
            EvalReport report;
            if (!eval_model.empty()) {
                report = evaluate_model(seq, Model::load(eval_model), eval_task);
            } else {
                const TrainConfig cfg = eval_cfg.resolve();
                EvaluateOptions opts;
                opts.task = eval_task;
                opts.seeds = eval_cfg.resolved_seeds(cfg);
                opts.attack = eval_attack.spec();
                opts.progress = progress;
                report = evaluate(seq, cfg, opts);
            }
            write_text(eval_report, report.to_json());
            print_aggregate(report, out);
        } else if (*gradcheck) {
            std::vector<std::string> names;
            if (gc_fixture == "all") {
                for (const auto& f : gradcheck_fixtures()) names.push_back(f.name);
            } else {
                names.push_back(gc_fixture);
            }
            bool ok = true;
            for (const auto& name : names) {
                GradCheckOptions o;
                o.coords_per_param = gc_coords;
                const auto t0 = std::chrono::steady_clock::now();
                const GradCheckResult r = run_gradcheck_fixture(name, o);
                const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                const bool pass = r.max_relative_error <= kGradTolerance;
                ok = ok && pass;
                char line[256];
                std::snprintf(line, sizeof line, "%-12s %s max_rel_err=%.3e coords=%zu worst=%s[%zu] %.2fs",
                              name.c_str(), pass ? "ok  " : "FAIL", r.max_relative_error, r.coords_checked,
                              r.worst_param.c_str(), r.worst_index, secs);
                out << line << '\n';
            }
            return ok ? 0 : 1;
        } else if (*export_cmd) {
            const SnapshotSequence seq = load_sequence(ex_in);
            const Model model = Model::load(ex_model);
            const auto sigma = sigma_stack(model, seq);
            const FingerprintTable table = fingerprints(sigma, seq);
            const std::filesystem::path dir(ex_out);
            std::filesystem::create_directories(dir);
            {
                std::ofstream csv(dir / "fingerprints.csv");
                if (!csv) throw ConfigError("cannot write fingerprints.csv");
                write_fingerprints_csv(table, csv);
            }
            const Watchlist w = watchlist(table, ex_threshold);
            write_text(dir / "watchlist.json", w.to_json());
            {
                std::ofstream dat(dir / "watchlist.dat");
                dat << "# snapshot listed_nodes\n";
                for (std::size_t s = 0; s < w.per_snapshot.size(); ++s) dat << s << ' ' << w.per_snapshot[s].size() << '\n';
            }
            nlohmann::json top = top_k_nodes(table, ex_top);
            write_text(dir / "top_nodes.json", top.dump());
            if (ex_clusters > 0 && !table.rows.empty()) {
                const int k = std::min<int>(ex_clusters, static_cast<int>(table.rows.size()));
                const KMeansResult km = kmeans(fingerprint_matrix(table), k, ex_seed);
                std::ofstream cl(dir / "clusters.csv");
                cl << "node_id,snapshot,cluster\n";
                for (std::size_t i = 0; i < table.rows.size(); ++i) {
                    cl << table.rows[i].node << ',' << table.rows[i].snapshot << ',' << km.assignment[i] << '\n';
                }
            }
            out << table.rows.size() << " fingerprints, " << w.counts.size() << " nodes above threshold " << ex_threshold
                << ", written to " << dir.string() << '\n';
        } else if (*plot) {
            std::ifstream in(plot_report);
            if (!in) throw ConfigError("cannot open report " + plot_report);
            std::stringstream buf;
            buf << in.rdbuf();
            const EvalReport report = EvalReport::from_json(buf.str());
            for (const auto& p : write_report_plots(report, plot_out)) out << "wrote " << p.string() << '\n';
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace dgten::cli
