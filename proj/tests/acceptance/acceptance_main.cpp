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

// Acceptance suite: one PASS/FAIL/NOT RUN line per criterion.
//
//   dgten_acceptance            run every criterion
//   dgten_acceptance 1 4 7      run a subset
//
// Exit status is 1 if any selected criterion failed, 77 if none of them
// could run (dataset missing), 0 otherwise.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#ifdef __GLIBC__
#include <malloc.h>
#endif

#include "dgten/adversarial.hpp"
#include "dgten/errors.hpp"
#include "dgten/gradcheck.hpp"
#include "dgten/log.hpp"
#include "dgten/metrics.hpp"
#include "dgten/protocol.hpp"
#include "dgten/structural.hpp"
#include "dgten/temporal.hpp"

using namespace dgten;
namespace fs = std::filesystem;

namespace {

enum class Outcome { Pass, Fail, NotRun };

struct Verdict {
    Outcome outcome;
    std::string detail;
};

Verdict pass_if(bool ok, std::string detail) { return {ok ? Outcome::Pass : Outcome::Fail, std::move(detail)}; }

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Matrix random_matrix(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> d(0.0, scale);
    Matrix m(r, c);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = d(rng);
    return m;
}

// ---------------------------------------------------------------------------

Verdict gradient_fidelity() {
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    std::string where;
    std::size_t coords = 0;
    for (const auto& f : gradcheck_fixtures()) {
        GradCheckOptions o;
        o.coords_per_param = 64;
        const auto r = run_gradcheck_fixture(f.name, o);
        coords += r.coords_checked;
        if (r.max_relative_error >= worst) {
            worst = r.max_relative_error;
            where = f.name + ":" + r.worst_param;
        }
    }
    const double secs = seconds_since(t0);
    return pass_if(worst <= 1e-4 && secs < 120.0,
                   fmt("max rel err %.2e (%s) over %zu fixtures, %zu coords, %.1f s (limits 1e-4, 120 s)", worst,
                       where.c_str(), gradcheck_fixtures().size(), coords, secs));
}

Verdict ode_identity() {
    std::mt19937_64 rng(2024);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::Index rows = 1 + static_cast<Eigen::Index>(rng() % 40);
        const Eigen::Index d = 1 + static_cast<Eigen::Index>(rng() % 16);
        const int steps = 1 + static_cast<int>(rng() % 8);
        ad::Tape t;
        const Matrix x = random_matrix(rows, d, rng, 3.0);
        const ad::OdeVars zero_field{t.constant(random_matrix(d, d, rng)), t.constant(random_matrix(1, d, rng)),
                                     t.constant(Matrix::Zero(d, d)), t.constant(Matrix::Zero(1, d))};
        const Matrix z = ad::ode_refine(t.constant(x), t.constant(random_matrix(rows, d, rng, 3.0)), zero_field, steps).value();
        worst = std::max(worst, (z - x).cwiseAbs().maxCoeff());
    }
    return pass_if(worst <= 1e-12, fmt("max |Z - X| = %.2e over 50 random fixtures (limit 1e-12)", worst));
}

Verdict chebyshev_oracle() {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double v = u(rng);
        for (int order = 0; order <= 8; ++order) {
            const Vector b = chebyshev_basis(v, order);
            for (int k = 0; k <= order; ++k) worst = std::max(worst, std::abs(b(k) - std::cos(k * std::acos(v))));
        }
    }
    return pass_if(worst <= 1e-9, fmt("max deviation %.2e over 1000 values, K = 0..8 (limit 1e-9)", worst));
}

Verdict raeca_contract() {
    std::mt19937_64 rng(7);
    const RaecaOptions opt;
    double worst_row = 0.0;
    std::size_t pruned = 0, pruned_nonzero = 0, edges_total = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 49);
        const int d = 2 + static_cast<int>(rng() % 8);
        Matrix mu = random_matrix(n, d, rng);
        mu.array() += 0.2;
        EdgeIndex g;
        std::set<std::pair<int, int>> seen;
        for (int k = 0; k < 3 * n; ++k) {
            const int a = static_cast<int>(rng() % static_cast<unsigned>(n));
            const int b = static_cast<int>(rng() % static_cast<unsigned>(n));
            if (a != b && seen.emplace(a, b).second) g.add(a, b, 1.0);
        }
        const auto c = raeca(mu, g, opt);
        std::vector<double> row(static_cast<std::size_t>(n), 0.0);
        for (std::size_t e = 0; e < g.size(); ++e) {
            row[static_cast<std::size_t>(g.dst[e])] += c.edge_alpha[e];
            if (c.pruned[e]) {
                ++pruned;
                pruned_nonzero += c.edge_alpha[e] != 0.0;
            }
        }
        for (int i = 0; i < n; ++i) {
            worst_row = std::max(worst_row, std::abs(row[static_cast<std::size_t>(i)] + c.self_alpha[static_cast<std::size_t>(i)] - 1.0));
        }
        edges_total += g.size();
    }

    // Two identical unit vectors: the hand-evaluated coefficient rule.
    Matrix mu(2, 2);
    mu << 1, 0, 1, 0;
    EdgeIndex g;
    g.add(1, 0, 1.0);
    const auto c = raeca(mu, g, opt);
    const double eps = opt.epsilon;
    const double s = 1.0 + 1.0 / (1.0 + eps), j = 1.0 / (1.0 + eps);
    const double fused = (s * s + j * j) / (s + j);
    const double r = fused / (fused + eps);
    const double hand_edge = r / (1.0 + r + eps), hand_self = 1.0 / (1.0 + r + eps);
    const double worked = std::max(std::abs(c.edge_alpha[0] - hand_edge), std::abs(c.self_alpha[0] - hand_self));

    return pass_if(worst_row <= 1e-6 && pruned_nonzero == 0 && worked <= 1e-9,
                   fmt("row-sum error %.2e on 100 graphs (%zu edges); %zu pruned, %zu nonzero; worked example "
                       "alpha %.9f/%.9f, deviation %.1e",
                       worst_row, edges_total, pruned, pruned_nonzero, c.edge_alpha[0], c.self_alpha[0], worked));
}

Verdict causality() {
    const TrainConfig cfg = fixture_config();
    std::mt19937_64 rng(5);
    const int nodes = 8, steps = 5;
    const Model model(cfg, nodes, steps, 17);
    auto random_slot = [&](int edges) {
        EdgeIndex g;
        std::set<std::pair<int, int>> seen;
        for (int k = 0; k < edges; ++k) {
            const int a = static_cast<int>(rng() % nodes), b = static_cast<int>(rng() % nodes);
            if (a != b && seen.emplace(a, b).second) g.add(a, b, (static_cast<double>(rng() % 21) - 10.0) / 10.0);
        }
        return g;
    };
    std::size_t violations = 0, weight_errors = 0;
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<EdgeIndex> slots;
        for (int s = 0; s < steps; ++s) slots.push_back(random_slot(10));
        const int cut = static_cast<int>(rng() % (steps - 1));
        std::vector<EdgeIndex> perturbed = slots;
        for (int s = cut + 1; s < steps; ++s) perturbed[static_cast<std::size_t>(s)] = random_slot(14);

        ad::Tape t1, t2;
        Matrix w;
        const Matrix a = model.forward(model.bind(t1), slots, nullptr, &w).z.value();
        const Matrix b = model.forward(model.bind(t2), perturbed).z.value();
        for (int n = 0; n < nodes; ++n) {
            for (int s = 0; s <= cut; ++s) violations += (a.row(n * steps + s).array() != b.row(n * steps + s).array()).count();
        }
        for (Eigen::Index r = 0; r < w.rows(); ++r) {
            const auto s = r % steps;
            weight_errors += std::abs(w.row(r).sum() - 1.0) > 1e-12;
            weight_errors += (w.row(r).tail(steps - 1 - s).array() != 0.0).count();
            if (s == 0) weight_errors += w(r, 0) != 1.0;
        }
    }
    return pass_if(violations == 0 && weight_errors == 0,
                   fmt("50 trials: %zu past coordinates changed, %zu attention-weight violations", violations,
                       weight_errors));
}

Verdict metric_oracles() {
    std::mt19937_64 rng(31);
    std::size_t auc_mismatch = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 4 + rng() % 200;
        std::vector<double> s(n);
        std::vector<int> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = static_cast<double>(rng() % 25) / 4.0;
            y[i] = static_cast<int>(rng() % 2);
        }
        y[0] = 1;
        y[1] = 0;
        double wins = 0.0, pairs = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t k = 0; k < n; ++k) {
                if (y[i] == 1 && y[k] == 0) {
                    pairs += 1.0;
                    wins += s[i] > s[k] ? 1.0 : (s[i] == s[k] ? 0.5 : 0.0);
                }
            }
        }
        auc_mismatch += auc(s, y) != wins / pairs;
    }
    const ConfusionCounts c{2, 3, 1, 1};
    const double ap = average_precision(std::vector<double>{0.9, 0.8, 0.7, 0.6}, std::vector<int>{1, 0, 1, 0});
    const double got[] = {mcc(c), balanced_accuracy(c), ap, f1_micro(c), f1_macro(c)};
    const double want[] = {0.4167, 0.7083, 0.8333, 0.6667, 0.7083};
    const double exact[] = {5.0 / 12.0, 17.0 / 24.0, 5.0 / 6.0, 2.0 / 3.0, 17.0 / 24.0};
    bool fixture_ok = true;
    for (int i = 0; i < 5; ++i) fixture_ok = fixture_ok && std::abs(got[i] - want[i]) < 5e-5 && std::abs(got[i] - exact[i]) < 1e-12;
    return pass_if(auc_mismatch == 0 && fixture_ok,
                   fmt("AUC == pairwise on %d/100 instances; MCC %.4f BA %.4f AP %.4f F1 %.4f/%.4f", 100 - static_cast<int>(auc_mismatch),
                       got[0], got[1], got[2], got[3], got[4]));
}

Verdict protocol_arithmetic() {
    std::size_t cases = 0, wrong = 0;
    for (std::size_t n = 2; n <= 30; ++n) {
        for (int t0 = 1; t0 <= 6; ++t0) {
            for (int delta = 1; delta <= 5; ++delta) {
                for (int task = 1; task <= 3; ++task) {
                    const long long expect = task == 2 ? static_cast<long long>(n) - delta - t0 + 1
                                                       : static_cast<long long>(n) - t0;
                    ++cases;
                    try {
                        const auto r = protocol_rounds(n, task, t0, delta);
                        wrong += expect < 1 || static_cast<long long>(r.size()) != expect;
                    } catch (const ConfigError&) {
                        wrong += expect >= 1;
                    }
                }
            }
        }
    }
    return pass_if(wrong == 0, fmt("%zu (N, T_initial, delta, task) combinations, %zu wrong", cases, wrong));
}

SnapshotSequence planted_sequence(std::uint64_t seed, std::size_t slots) {
    std::mt19937_64 rng(seed);
    const int nodes = 50, bad = 10;
    EdgeList list;
    for (int v = 0; v < nodes; ++v) list.raw_ids.push_back(v);
    for (int k = 0; k < 500; ++k) {
        const auto a = static_cast<NodeId>(rng() % nodes), b = static_cast<NodeId>(rng() % nodes);
        if (a == b) continue;
        const bool negative = (b < bad) ? rng() % 100 < 85 : rng() % 100 < 5;
        const int mag = 1 + static_cast<int>(rng() % 10);
        list.records.push_back({a, b, negative ? -mag : mag, static_cast<double>(k)});
    }
    return discretize(list, slots);
}

Verdict attack_postconditions() {
    std::size_t victims = 0, count_errors = 0, onoff_errors = 0, determinism_errors = 0;
    std::vector<std::string> sink;
    auto prev = set_warning_sink([&](const std::string& m) { sink.push_back(m); });
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto seq = planted_sequence(seed, 6);
        for (auto kind : {AttackKind::GoodMouthing, AttackKind::BadMouthing, AttackKind::OnOff}) {
            AttackSpec spec{kind, 0.3, seed * 13, seed % 2};
            const auto r = apply_attack(seq, spec);
            const auto again = apply_attack(seq, spec);
            determinism_errors += !(r.sequence == again.sequence && r.injected == again.injected);

            std::map<std::pair<std::size_t, NodeId>, std::size_t> got;
            for (const auto& e : r.injected) ++got[{e.slot, e.victim}];
            std::set<std::size_t> attacked;
            for (const auto& [slot, vs] : r.victims) {
                attacked.insert(slot);
                const auto agg = aggregate_edges(seq, slot + 1);
                std::set<NodeId> pool;
                std::map<NodeId, std::size_t> degree;
                for (const auto& e : agg) {
                    pool.insert(e.trustor);
                    pool.insert(e.trustee);
                    ++degree[e.trustor];
                    ++degree[e.trustee];
                }
                std::set<std::pair<NodeId, NodeId>> present;
                for (const auto& e : seq.snapshots[slot].edges) present.emplace(e.trustor, e.trustee);
                for (NodeId v : vs) {
                    ++victims;
                    std::size_t candidates = 0;
                    for (NodeId a : pool) candidates += a != v && !present.count({a, v});
                    count_errors += got[{slot, v}] != std::min(degree[v], candidates);
                }
            }
            if (kind == AttackKind::OnOff) {
                for (std::size_t k = 0; k < seq.size(); ++k) {
                    const bool on = k >= spec.phase_origin && (k - spec.phase_origin) % 2 == 0;
                    onoff_errors += on != attacked.count(k);
                    if (!on) onoff_errors += !(r.sequence.snapshots[k] == seq.snapshots[k]);
                }
            }
        }
    }
    set_warning_sink(prev);
    return pass_if(victims > 0 && count_errors == 0 && onoff_errors == 0 && determinism_errors == 0,
                   fmt("%zu victims: %zu count mismatches, %zu on-off slot errors, %zu nondeterministic runs", victims,
                       count_errors, onoff_errors, determinism_errors));
}

// ---------------------------------------------------------------------------
// Dataset criteria

fs::path data_dir() {
    if (const char* env = std::getenv("DGTEN_DATA_DIR")) return env;
    return DGTEN_DEFAULT_DATA_DIR;
}

std::optional<fs::path> dataset(const char* file) {
    const fs::path p = data_dir() / file;
    if (fs::exists(p)) return p;
    return std::nullopt;
}

constexpr const char* kOtc = "soc-sign-bitcoinotc.csv";
constexpr const char* kAlpha = "soc-sign-bitcoinalpha.csv";

Verdict not_run(const std::vector<const char*>& files) {
    std::string list;
    for (const char* f : files) list += (list.empty() ? "" : ", ") + std::string(f);
    return {Outcome::NotRun, "dataset not available (" + list + " in " + data_dir().string() + ")"};
}

Verdict homophily_measurement() {
    const auto otc = dataset(kOtc);
    const auto alpha = dataset(kAlpha);
    if (!otc || !alpha) return not_run({kOtc, kAlpha});
    const auto otc_seq = discretize(load_edge_list(*otc), 10);
    const auto alpha_seq = discretize(load_edge_list(*alpha), 10);
    const double h_otc = edge_homophily(otc_seq);
    const double h_alpha = edge_homophily(alpha_seq);
    const auto so = record_stats(load_edge_list(*otc));
    const auto sa = record_stats(load_edge_list(*alpha));
    return pass_if(std::abs(h_otc - 0.90) <= 0.03 && std::abs(h_alpha - 0.94) <= 0.03,
                   fmt("OTC %.4f (target 0.90 +- 0.03, %zu nodes / %zu edges / %zu distrust; reference 5881 / 35592 / "
                       "3563), Alpha %.4f (target 0.94 +- 0.03, %zu nodes / %zu edges / %zu distrust; reference 3775 / "
                       "24186 / 1536)",
                       h_otc, so.nodes, so.edges, so.distrust_edges, h_alpha, sa.nodes, sa.edges, sa.distrust_edges));
}

EvalReport alpha_task1(const TrainConfig& cfg, std::optional<AttackSpec> attack) {
    const auto alpha = dataset(kAlpha);
    const auto seq = discretize(load_edge_list(*alpha), 10);
    EvaluateOptions opts;
    opts.task = 1;
    opts.seeds = {1, 2, 3};
    opts.attack = attack;
    opts.progress = [](const std::string& m) { std::fprintf(stderr, "  %s\n", m.c_str()); };
    return evaluate(seq, cfg, opts);
}

double mean_metric(const EvalReport& r, const std::string& name) {
    for (const auto& [k, v] : r.aggregate()) {
        if (k == name) return v.mean;
    }
    return std::nan("");
}

Verdict alpha_smoke() {
    if (!dataset(kAlpha)) return not_run({kAlpha});
    TrainConfig cfg;
    cfg.apply_preset("alpha");
    const auto t0 = std::chrono::steady_clock::now();
    const EvalReport r = alpha_task1(cfg, std::nullopt);
    const double minutes = seconds_since(t0) / 60.0;
    const double m = mean_metric(r, "mcc"), a = mean_metric(r, "auc");
    return pass_if(m >= 0.30 && a >= 0.70 && minutes <= 60.0,
                   fmt("mean MCC %.4f (>= 0.30), AUC %.4f (>= 0.70), %zu rounds, %.1f min (<= 60) on %u threads", m, a,
                       r.rounds.size(), minutes, default_threads()));
}

Verdict robustness_direction() {
    if (!dataset(kAlpha)) return not_run({kAlpha});
    TrainConfig robust;
    robust.apply_preset("alpha");
    TrainConfig plain = robust;
    plain.robust_aggregation = false;
    AttackSpec attack{AttackKind::BadMouthing, 0.10, 1};
    const double with = mean_metric(alpha_task1(robust, attack), "mcc");
    const double without = mean_metric(alpha_task1(plain, attack), "mcc");
    return pass_if(with > without, fmt("bad-mouthing MCC: defensive %.4f vs mean aggregation %.4f", with, without));
}

struct Criterion {
    int id;
    const char* name;
    std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
#ifdef __GLIBC__
    mallopt(M_MMAP_THRESHOLD, 32 << 20);
    mallopt(M_TRIM_THRESHOLD, 512 << 20);
#endif
    const std::vector<Criterion> all{
        {1, "gradient fidelity", gradient_fidelity},     {2, "ODE identity", ode_identity},
        {3, "Chebyshev oracle", chebyshev_oracle},       {4, "RAECA contract", raeca_contract},
        {5, "causality", causality},                     {6, "metric oracles", metric_oracles},
        {7, "protocol arithmetic", protocol_arithmetic}, {8, "attack postconditions", attack_postconditions},
        {9, "homophily measurement", homophily_measurement}, {10, "end-to-end smoke", alpha_smoke},
        {11, "robustness direction", robustness_direction},
    };
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

    int failed = 0, ran = 0;
    for (const auto& c : all) {
        if (!selected.empty() && !selected.count(c.id)) continue;
        Verdict v;
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v = {Outcome::Fail, std::string("exception: ") + e.what()};
        }
        const char* tag = v.outcome == Outcome::Pass ? "PASS" : v.outcome == Outcome::Fail ? "FAIL" : "NOT RUN";
        std::printf("[%-7s] %2d %-22s %s\n", tag, c.id, c.name, v.detail.c_str());
        std::fflush(stdout);
        failed += v.outcome == Outcome::Fail;
        ran += v.outcome != Outcome::NotRun;
    }
    if (failed > 0) return 1;
    return ran == 0 ? 77 : 0;
}
