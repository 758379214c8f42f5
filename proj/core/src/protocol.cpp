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

#include "dgten/protocol.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <numeric>
#include <thread>

#include <nlohmann/json.hpp>

#include "dgten/errors.hpp"
#include "dgten/log.hpp"
#include "dgten/training.hpp"

namespace dgten {
namespace {

std::uint64_t derive_seed(std::uint64_t seed, std::size_t t_end, std::uint32_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(t_end), stream};
    std::uint32_t out[2];
    seq.generate(out, out + 2);
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

void check_task(int task) {
    if (task < 1 || task > 3) throw ConfigError("task must be 1, 2 or 3");
}

const char* const kMetricNames[] = {"mcc", "auc", "ba", "ap", "f1_micro", "f1_macro"};

double metric_value(const MetricSet& m, std::size_t k) {
    const double values[] = {m.mcc, m.auc, m.ba, m.ap, m.f1_micro, m.f1_macro};
    return values[k];
}

nlohmann::json attack_json(const AttackSpec& a) {
    return {{"kind", to_string(a.kind)},
            {"victim_fraction", a.victim_fraction},
            {"seed", a.seed},
            {"phase_origin", a.phase_origin},
            {"target_slot", a.target_slot}};
}

}  // namespace

std::vector<std::size_t> protocol_rounds(std::size_t n, int task, int t_initial, int delta) {
    check_task(task);
    if (t_initial < 1 || delta < 1) throw ConfigError("t_initial and delta must be positive");
    const auto t0 = static_cast<std::size_t>(t_initial);
    const std::size_t last = task == 2 ? (n >= static_cast<std::size_t>(delta) ? n - static_cast<std::size_t>(delta) : 0)
                                       : (n >= 1 ? n - 1 : 0);
    if (last < t0) {
        throw ConfigError("sequence of " + std::to_string(n) + " slots is too short for task " + std::to_string(task));
    }
    std::vector<std::size_t> rounds;
    for (std::size_t t = t0; t <= last; ++t) rounds.push_back(t);
    return rounds;
}

std::vector<bool> observed_nodes(const SnapshotSequence& seq, std::size_t slot_count) {
    std::vector<bool> seen(seq.global_node_count, false);
    for (std::size_t t = 0; t < slot_count && t < seq.size(); ++t) {
        for (const auto& e : seq.snapshots[t].edges) {
            seen[e.trustor] = true;
            seen[e.trustee] = true;
        }
    }
    return seen;
}

EdgeBatch test_batch(const SnapshotSequence& seq, std::size_t t_end, int task, int delta) {
    check_task(task);
    if (t_end < 1) throw ConfigError("t_end must be >= 1");
    const std::size_t horizon = task == 2 ? static_cast<std::size_t>(delta) : 1;
    if (t_end + horizon > seq.size()) throw ConfigError("test slots beyond the sequence");
    const auto seen = observed_nodes(seq, t_end);
    std::vector<bool> fresh(seq.global_node_count, false);
    if (task == 3) {
        const auto first = first_appearance(seq);
        for (std::size_t v = 0; v < fresh.size(); ++v) fresh[v] = first[v] == static_cast<int>(t_end) - 1;
    }
    const auto z_slot = static_cast<Eigen::Index>(t_end - 1);
    EdgeBatch batch;
    for (std::size_t t = t_end; t < t_end + horizon; ++t) {
        for (const auto& e : seq.snapshots[t].edges) {
            if (!seen[e.trustor] || !seen[e.trustee]) continue;
            if (task == 3 && !fresh[e.trustor] && !fresh[e.trustee]) continue;
            batch.add(e.trustor, e.trustee, z_slot, e.label() == TrustLabel::Distrust ? 1.0 : 0.0);
        }
    }
    return batch;
}

std::vector<double> score(const Model& model, const SnapshotSequence& seq, const EdgeBatch& batch) {
    if (seq.global_node_count != static_cast<std::size_t>(model.nodes())) {
        throw LookupError("sequence node count does not match the model");
    }
    const auto slots = edge_indices(seq, static_cast<std::size_t>(model.horizon()));
    ad::Tape tape;
    const auto bound = model.bind(tape);
    const auto out = model.forward(bound, slots);
    const auto logits = ad::predict_logits(out.z, out.steps, batch, bound.head_w, bound.head_b);
    const Matrix& v = logits.value();
    return std::vector<double>(v.data(), v.data() + v.size());
}

unsigned default_threads() {
    if (const char* env = std::getenv("DGTEN_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return static_cast<unsigned>(n);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

EvalReport evaluate(const SnapshotSequence& seq, const TrainConfig& config, const EvaluateOptions& options,
                    std::optional<Model>* final_model) {
    config.validate();
    check_task(options.task);
    if (options.seeds.empty()) throw ConfigError("at least one seed is required");
    if (options.attack) options.attack->validate();
    const auto rounds = protocol_rounds(seq.size(), options.task, config.t_initial, config.delta);

    EvalReport report;
    report.task = options.task;
    report.config = config;
    report.seeds = options.seeds;
    report.attack = options.attack;
    report.planned_rounds = rounds.size();

    struct Job {
        std::size_t t_end;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (std::uint64_t s : options.seeds) {
        for (std::size_t t : rounds) jobs.push_back({t, s});
    }
    // Longest windows first so the tail of the schedule is short.
    std::vector<std::size_t> order(jobs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return jobs[a].t_end > jobs[b].t_end; });
    std::vector<std::optional<RoundResult>> results(jobs.size());
    std::vector<std::optional<SkippedRound>> skips(jobs.size());
    std::vector<std::exception_ptr> errors(jobs.size());
    std::mutex mu;
    std::atomic<std::size_t> next{0};

    auto run_job = [&](std::size_t j) {
        const Job& job = jobs[j];
        const EdgeBatch test = test_batch(seq, job.t_end, options.task, config.delta);
        const auto distrust = std::count(test.target.begin(), test.target.end(), 1.0);
        if (distrust == 0 || distrust == static_cast<long>(test.size())) {
            const std::string reason = test.size() == 0 ? "no test edges" : "single-class ground truth";
            warn("round t_end=" + std::to_string(job.t_end) + " seed=" + std::to_string(job.seed) + " skipped: " + reason);
            skips[j] = SkippedRound{job.t_end, job.seed, reason};
            return;
        }
        SnapshotSequence window = seq.prefix(job.t_end);
        if (options.attack) {
            AttackSpec spec = *options.attack;
            if (spec.kind != AttackKind::OnOff) spec.target_slot = static_cast<long long>(job.t_end) - 1;
            window = apply_attack(window, spec).sequence;
        }
        const auto slots = edge_indices(window, job.t_end);
        const EdgeBatch train_batch = training_batch(window, job.t_end, config.train_on_next_slot);

        Model model(config, static_cast<int>(seq.global_node_count), static_cast<int>(job.t_end),
                    derive_seed(job.seed, job.t_end, 0));
        const TrainResult tr = train(model, slots, train_batch, derive_seed(job.seed, job.t_end, 1));
        const auto logits = score(model, window, test);
        std::vector<int> labels(test.size());
        for (std::size_t i = 0; i < test.size(); ++i) labels[i] = test.target[i] > 0.5 ? 1 : 0;

        RoundResult r;
        r.t_end = job.t_end;
        r.seed = job.seed;
        r.train_edges = train_batch.size();
        r.test_edges = test.size();
        r.final_loss = tr.loss.empty() ? 0.0 : tr.loss.back();
        r.metrics = evaluate_logits(logits, labels);
        results[j] = r;
        if (final_model != nullptr && job.seed == options.seeds.front() && job.t_end == rounds.back()) {
            std::lock_guard lock(mu);
            *final_model = std::move(model);
        }
        if (options.progress) {
            std::lock_guard lock(mu);
            options.progress("round t_end=" + std::to_string(job.t_end) + " seed=" + std::to_string(job.seed) +
                             " mcc=" + std::to_string(r.metrics.mcc) + " auc=" + std::to_string(r.metrics.auc));
        }
    };

    const unsigned threads = std::min<unsigned>(options.threads ? options.threads : default_threads(),
                                                static_cast<unsigned>(jobs.size()));
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            const std::size_t j = order[i];
            try {
                run_job(j);
            } catch (...) {
                errors[j] = std::current_exception();
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    for (std::size_t j = 0; j < jobs.size(); ++j) {
        if (results[j]) report.rounds.push_back(*results[j]);
        if (skips[j]) report.skipped.push_back(*skips[j]);
    }
    return report;
}

EvalReport evaluate_model(const SnapshotSequence& seq, const Model& model, int task) {
    check_task(task);
    const auto t_end = static_cast<std::size_t>(model.horizon());
    EvalReport report;
    report.task = task;
    report.config = model.config();
    report.seeds = {model.config().seed};
    report.planned_rounds = 1;
    const EdgeBatch test = test_batch(seq, t_end, task, model.config().delta);
    const auto distrust = std::count(test.target.begin(), test.target.end(), 1.0);
    if (distrust == 0 || distrust == static_cast<long>(test.size())) {
        warn("round t_end=" + std::to_string(t_end) + " skipped: single-class ground truth");
        report.skipped.push_back({t_end, model.config().seed, "single-class ground truth"});
        return report;
    }
    const auto logits = score(model, seq, test);
    std::vector<int> labels(test.size());
    for (std::size_t i = 0; i < test.size(); ++i) labels[i] = test.target[i] > 0.5 ? 1 : 0;
    RoundResult r;
    r.t_end = t_end;
    r.seed = model.config().seed;
    r.test_edges = test.size();
    r.metrics = evaluate_logits(logits, labels);
    report.rounds.push_back(r);
    return report;
}

std::vector<std::pair<std::string, MeanSd>> EvalReport::aggregate() const {
    std::vector<std::pair<std::string, MeanSd>> out;
    for (std::size_t k = 0; k < std::size(kMetricNames); ++k) {
        MeanSd ms;
        if (!rounds.empty()) {
            double sum = 0.0;
            for (const auto& r : rounds) sum += metric_value(r.metrics, k);
            ms.mean = sum / static_cast<double>(rounds.size());
            if (rounds.size() > 1) {
                double sq = 0.0;
                for (const auto& r : rounds) sq += std::pow(metric_value(r.metrics, k) - ms.mean, 2);
                ms.sd = std::sqrt(sq / static_cast<double>(rounds.size() - 1));
            }
        }
        out.emplace_back(kMetricNames[k], ms);
    }
    return out;
}

std::string EvalReport::to_json() const {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : rounds) {
        rows.push_back({{"t_end", r.t_end},
                        {"seed", r.seed},
                        {"train_edges", r.train_edges},
                        {"test_edges", r.test_edges},
                        {"final_loss", r.final_loss},
                        {"mcc", r.metrics.mcc},
                        {"auc", r.metrics.auc},
                        {"ba", r.metrics.ba},
                        {"ap", r.metrics.ap},
                        {"f1_micro", r.metrics.f1_micro},
                        {"f1_macro", r.metrics.f1_macro}});
    }
    nlohmann::json skipped_rows = nlohmann::json::array();
    for (const auto& s : skipped) skipped_rows.push_back({{"t_end", s.t_end}, {"seed", s.seed}, {"reason", s.reason}});
    nlohmann::json agg = nlohmann::json::object();
    for (const auto& [name, ms] : aggregate()) agg[name] = {{"mean", ms.mean}, {"sd", ms.sd}};
    const nlohmann::json j{{"task", task},
                           {"config", nlohmann::json::parse(config.to_json())},
                           {"seeds", seeds},
                           {"attack", attack ? attack_json(*attack) : nlohmann::json(nullptr)},
                           {"planned_rounds", planned_rounds},
                           {"rounds", rows},
                           {"skipped", skipped_rows},
                           {"aggregate", agg}};
    return j.dump(2);
}

EvalReport EvalReport::from_json(const std::string& text) {
    EvalReport r;
    try {
        const auto j = nlohmann::json::parse(text);
        r.task = j.at("task").get<int>();
        r.config = TrainConfig::from_json(j.at("config").dump());
        r.seeds = j.value("seeds", std::vector<std::uint64_t>{});
        r.planned_rounds = j.value("planned_rounds", std::size_t{0});
        if (j.contains("attack") && !j["attack"].is_null()) {
            const auto& a = j["attack"];
            AttackSpec spec;
            spec.kind = parse_attack_kind(a.at("kind").get<std::string>());
            spec.victim_fraction = a.at("victim_fraction").get<double>();
            spec.seed = a.at("seed").get<std::uint64_t>();
            spec.phase_origin = a.at("phase_origin").get<std::size_t>();
            spec.target_slot = a.at("target_slot").get<long long>();
            r.attack = spec;
        }
        for (const auto& row : j.at("rounds")) {
            RoundResult rr;
            rr.t_end = row.at("t_end").get<std::size_t>();
            rr.seed = row.value("seed", std::uint64_t{0});
            rr.train_edges = row.value("train_edges", std::size_t{0});
            rr.test_edges = row.value("test_edges", std::size_t{0});
            rr.final_loss = row.value("final_loss", 0.0);
            rr.metrics = {row.at("mcc").get<double>(),      row.at("auc").get<double>(),
                          row.at("ba").get<double>(),       row.at("ap").get<double>(),
                          row.at("f1_micro").get<double>(), row.at("f1_macro").get<double>()};
            r.rounds.push_back(rr);
        }
        for (const auto& row : j.value("skipped", nlohmann::json::array())) {
            r.skipped.push_back({row.at("t_end").get<std::size_t>(), row.value("seed", std::uint64_t{0}),
                                 row.value("reason", std::string{})});
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("report JSON: ") + e.what());
    }
    return r;
}

}  // namespace dgten
