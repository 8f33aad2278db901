// Acceptance harness: ten end-to-end checks, one PASS/FAIL line each.
//
//   usage: evifuse_acceptance <cli-binary> <data-dir>
//
// <data-dir> must hold toy/ (the bundled synthetic corpus) and golden/
// (the frozen reference run). Checks 1-6 and 9 exercise the library
// in-process; 6-10 drive the CLI binary through a scratch directory.
// The exit code is the number of failed checks.

#include <algorithm>
#include <climits>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "json.hpp"

#include "evifuse/eval.hpp"
#include "evifuse/fusion.hpp"
#include "evifuse/index.hpp"
#include "evifuse/io.hpp"
#include "evifuse/priors.hpp"
#include "evifuse/ranker.hpp"
#include "generators.hpp"
#include "oracle.hpp"

using namespace evifuse;

namespace {

std::string g_cli;
std::string g_data;

#define EXPECT(cond, detail)                  \
    do {                                      \
        if (!(cond)) return std::string(detail); \
    } while (0)

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in.good()) return {};
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool copy_file(const std::string& src, const std::string& dst) {
    std::ifstream in(src, std::ios::binary);
    if (!in.good()) return false;
    std::ofstream out(dst, std::ios::binary | std::ios::trunc);
    if (!out.good()) return false;
    out << in.rdbuf();
    return out.good();
}

int shell(const std::string& cmd) {
    const int rc = std::system(cmd.c_str());
    if (rc == -1) return -1;
    if (WIFEXITED(rc)) return WEXITSTATUS(rc);
    return -2;
}

// ------------------------------------------------- CLI pipeline (shared) ---

/// One scratch-directory run of the full CLI pipeline over the bundled
/// corpus; built lazily, consumed by checks 6-8 and 10.
struct Pipeline {
    std::string error;  // non-empty: setup failed, checks report it
    std::string work;
    std::string run_graph;      // ds + graph prior, serial
    std::string run_graph2;     // same command a second time
    std::string run_parallel;   // same command, 4 worker threads
    std::string run_layout;     // ds + layout prior
    std::string run_baseline;   // raw-similarity baseline
    std::string report_c7;      // eval: baseline vs graph, ks 1,3,5,10
    std::string report_c8;      // eval: layout alone, k 1
};

Pipeline build_pipeline() {
    Pipeline p;
    char tmpl[] = "/tmp/evifuse_acceptance_XXXXXX";
    const char* made = mkdtemp(tmpl);
    if (!made) {
        p.error = "could not create a scratch directory";
        return p;
    }
    p.work = made;

    for (const char* name : {"embeddings.jsonl", "query_vectors.jsonl", "kg_edges.jsonl",
                             "layout.jsonl", "qrels.jsonl"}) {
        if (!copy_file(g_data + "/toy/" + name, p.work + "/" + name)) {
            p.error = std::string("missing corpus file ") + name + " under " + g_data + "/toy";
            return p;
        }
    }

    auto run = [&](const std::string& tail) {
        return shell("cd '" + p.work + "' && SOURCE_DATE_EPOCH=0 '" + g_cli + "' " + tail +
                     " >/dev/null 2>>setup_stderr.txt");
    };

    if (run("index --embeddings embeddings.jsonl --out toy.index") != 0) {
        p.error = "index build failed: " + slurp(p.work + "/setup_stderr.txt");
        return p;
    }

    const std::string rerank_graph =
        "rerank --index toy.index --queries query_vectors.jsonl --kg-edges kg_edges.jsonl "
        "--prior graph --fusion ds --top-k 10";
    p.run_graph = p.work + "/run_graph.jsonl";
    p.run_graph2 = p.work + "/run_graph2.jsonl";
    p.run_parallel = p.work + "/run_parallel.jsonl";
    p.run_layout = p.work + "/run_layout.jsonl";
    p.run_baseline = p.work + "/run_baseline.jsonl";
    struct Step {
        std::string cmd;
        const char* what;
    };
    const Step steps[] = {
        {rerank_graph + " --threads 1 --out run_graph.jsonl", "graph rerank"},
        {rerank_graph + " --threads 1 --out run_graph2.jsonl", "graph rerank (repeat)"},
        {rerank_graph + " --threads 4 --out run_parallel.jsonl", "graph rerank (parallel)"},
        {"rerank --index toy.index --queries query_vectors.jsonl --layout layout.jsonl "
         "--prior layout --fusion ds --top-k 10 --threads 1 --out run_layout.jsonl",
         "layout rerank"},
        {"rerank --index toy.index --queries query_vectors.jsonl --prior none --baseline "
         "--top-k 10 --threads 1 --out run_baseline.jsonl",
         "baseline rerank"},
        {"eval --run run_baseline.jsonl --run run_graph.jsonl --qrels qrels.jsonl "
         "--ks 1,3,5,10 --out report_c7.jsonl",
         "baseline-vs-graph eval"},
        {"eval --run run_layout.jsonl --qrels qrels.jsonl --ks 1 --out report_c8.jsonl",
         "layout eval"},
    };
    for (const Step& step : steps) {
        if (run(step.cmd) != 0) {
            p.error = std::string(step.what) +
                      " failed: " + slurp(p.work + "/setup_stderr.txt");
            return p;
        }
    }
    p.report_c7 = p.work + "/report_c7.jsonl";
    p.report_c8 = p.work + "/report_c8.jsonl";
    return p;
}

Pipeline& pipeline() {
    static Pipeline p = build_pipeline();
    return p;
}

/// Per-run recall tables out of a machine-readable report file.
struct ParsedReport {
    std::map<std::string, std::map<int, double>> recall;  // run path -> k -> value
    std::map<int, double> delta;
    bool has_delta = false;
};

ParsedReport parse_report(const std::string& path) {
    ParsedReport out;
    std::ifstream in(path);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const nlohmann::json j = nlohmann::json::parse(line);
        if (j.contains("run")) {
            std::map<int, double> at;
            for (const auto& [k, v] : j.at("recall").items()) at[std::stoi(k)] = v.get<double>();
            out.recall[j.at("run").get<std::string>()] = std::move(at);
        } else if (j.contains("delta")) {
            for (const auto& [k, v] : j.at("delta").items())
                out.delta[std::stoi(k)] = v.get<double>();
            out.has_delta = true;
        }
    }
    return out;
}

// ------------------------------------------------------------- criteria ---

std::string crit_likelihood_oracle() {
    const FusionConfig cfg;
    const LikelihoodResult two = likelihood_ds(
        {{Modality::Text, 1.0}, {Modality::Image, 1.0}}, cfg);
    EXPECT(two.value == 0.955, "two-source fixture: got " + num(two.value) + ", want 0.955");
    const LikelihoodResult one = likelihood_ds({{Modality::Text, 1.0}}, cfg);
    EXPECT(one.value == 0.85, "single-source fixture: got " + num(one.value) + ", want 0.85");
    const LikelihoodResult conflict = likelihood_ds(
        {{Modality::Text, 1.0}, {Modality::Image, 0.0}}, cfg);
    EXPECT(conflict.value == 0.5862068965517241,
           "conflict-pair fixture: got " + num(conflict.value));

    std::mt19937_64 rng(2024);
    for (int i = 0; i < 1000; ++i) {
        const std::vector<double> scores = gen::score_vector(rng);
        std::vector<std::pair<Modality, double>> tagged;
        for (std::size_t j = 0; j < scores.size(); ++j)
            tagged.emplace_back(static_cast<Modality>(j), scores[j]);
        const LikelihoodResult got = likelihood_ds(tagged, cfg);
        const oracle::FoldResult want = oracle::fold(scores);
        EXPECT(got.aborted == want.aborted,
               "vector " + std::to_string(i) + ": abort flags diverge");
        EXPECT(std::abs(got.value - want.value) <= 1e-12,
               "vector " + std::to_string(i) + ": " + num(got.value) + " vs reference " +
                   num(want.value));
        EXPECT(got.conflict_trace.size() == want.conflicts.size(),
               "vector " + std::to_string(i) + ": conflict trace length diverges");
        for (std::size_t j = 0; j < want.conflicts.size(); ++j)
            EXPECT(std::abs(got.conflict_trace[j] - want.conflicts[j]) <= 1e-12,
                   "vector " + std::to_string(i) + ": conflict step " + std::to_string(j));
    }
    return {};
}

std::string crit_mass_algebra() {
    const FusionConfig cfg;
    const MassFunction vac = vacuous_mass();
    std::mt19937_64 rng(2025);
    auto close = [](const MassFunction& a, const MassFunction& b, double tol) {
        return std::abs(a.y - b.y) <= tol && std::abs(a.n - b.n) <= tol &&
               std::abs(a.omega - b.omega) <= tol;
    };
    for (int i = 0; i < 10000; ++i) {
        const MassFunction a = gen::mass(rng);
        const MassFunction b = gen::mass(rng);
        const MassFunction c = gen::mass(rng);

        const CombineOutcome ab = combine_dempster(a, b, cfg);
        const CombineOutcome ba = combine_dempster(b, a, cfg);
        EXPECT(ab.extreme_conflict() == ba.extreme_conflict(),
               "commutativity: conflict outcomes diverge at trial " + std::to_string(i));
        if (!ab.extreme_conflict()) {
            EXPECT(close(*ab.mass, *ba.mass, 1e-12),
                   "commutativity beyond 1e-12 at trial " + std::to_string(i));
            const double sum = ab.mass->y + ab.mass->n + ab.mass->omega;
            EXPECT(std::abs(sum - 1.0) <= 1e-9 && ab.mass->y >= 0 && ab.mass->n >= 0 &&
                       ab.mass->omega >= 0,
                   "closure violated at trial " + std::to_string(i) + " (sum " + num(sum) + ")");
        }

        const CombineOutcome av = combine_dempster(a, vac, cfg);
        const CombineOutcome va = combine_dempster(vac, a, cfg);
        EXPECT(av.mass && va.mass, "vacuous identity hit extreme conflict");
        EXPECT(av.mass->y == a.y && av.mass->n == a.n && av.mass->omega == a.omega,
               "right vacuous identity not exact at trial " + std::to_string(i));
        EXPECT(va.mass->y == a.y && va.mass->n == a.n && va.mass->omega == a.omega,
               "left vacuous identity not exact at trial " + std::to_string(i));

        const CombineOutcome bc = combine_dempster(b, c, cfg);
        if (!ab.extreme_conflict() && !bc.extreme_conflict()) {
            const CombineOutcome left = combine_dempster(*ab.mass, c, cfg);
            const CombineOutcome right = combine_dempster(a, *bc.mass, cfg);
            if (!left.extreme_conflict() && !right.extreme_conflict())
                EXPECT(close(*left.mass, *right.mass, 1e-9),
                       "associativity beyond 1e-9 at trial " + std::to_string(i));
        }
    }
    return {};
}

std::string crit_conflict_semantics() {
    const FusionConfig cfg;
    const CombineOutcome certain =
        combine_dempster(MassFunction{1.0, 0.0, 0.0}, MassFunction{0.0, 1.0, 0.0}, cfg);
    EXPECT(certain.extreme_conflict(), "certain-yes vs certain-no must be extreme conflict");
    EXPECT(certain.conflict == 1.0, "conflict coefficient should be exactly 1");

    FusionConfig fully_trusting;
    fully_trusting.alpha = 1.0;
    fully_trusting.beta = 1.0;
    const LikelihoodResult zeroed = likelihood_ds(
        {{Modality::Text, 1.0}, {Modality::Image, 0.0}}, fully_trusting);
    EXPECT(zeroed.aborted && zeroed.value == 0.0,
           "fully trusted contradictory scores must zero the likelihood");

    const double consistent =
        likelihood_ds({{Modality::Text, 0.9}, {Modality::Image, 0.9}}, cfg).value;
    const double conflicting =
        likelihood_ds({{Modality::Text, 0.9}, {Modality::Image, 0.1}}, cfg).value;
    EXPECT(consistent > conflicting, "consistent pair " + num(consistent) +
                                         " does not outscore conflicting pair " +
                                         num(conflicting));
    return {};
}

std::string crit_prior_formulas() {
    const FusionConfig cfg;  // kappa = 0.1, tau = 2, tau_page = 2, epsilon = 0.1
    EXPECT(std::abs(edge_probability(10.0, cfg) - (1.0 - std::exp(-1.0))) <= 1e-12,
           "saturating edge probability off at weight 10");

    std::mt19937_64 rng(2026);
    double prev_w = 0.0, prev_p = edge_probability(0.0, cfg);
    EXPECT(prev_p == 0.0, "zero weight must give zero probability");
    for (int i = 0; i < 500; ++i) {
        const double w = prev_w + 0.01 + gen::unit(rng);
        const double p = edge_probability(w, cfg);
        EXPECT(p > prev_p, "edge probability not strictly increasing at weight " + num(w));
        EXPECT(p >= 0.0 && p < 1.0, "edge probability escaped [0, 1) at weight " + num(w));
        prev_w = w;
        prev_p = p;
    }

    for (int i = 0; i < 100; ++i) {
        GraphEdgeStore store;
        const std::string ids[3] = {"x", "y", "z"};
        for (int e = 0; e < 4; ++e)
            store.add_relation(ids[rng() % 3], ids[rng() % 3], 10.0 * gen::unit(rng));
        std::string p[3] = {"x", "y", "z"};
        const double ref = graph_prior(p[0], p[1], p[2], store, cfg);
        std::sort(std::begin(p), std::end(p));
        do {
            EXPECT(std::abs(graph_prior(p[0], p[1], p[2], store, cfg) - ref) <= 1e-12,
                   "triangle prior not permutation symmetric at trial " + std::to_string(i));
        } while (std::next_permutation(std::begin(p), std::end(p)));
    }

    auto rec = [](int page, double cx, double cy) {
        LayoutRecord r;
        r.chunk_id = "c";
        r.doc_id = "d";
        r.page = page;
        r.bbox = BBox{cx, cy, cx, cy};
        r.page_width = 100.0;
        r.page_height = 100.0;
        return r;
    };
    const struct {
        LayoutRecord t, v, s;
        double want;
    } cases[] = {
        {rec(3, 10, 10), rec(3, 10, 10), rec(3, 0, 0), 1.0},     // co-located
        {rec(1, 10, 10), rec(1, 10, 10), rec(9, 0, 0), 0.1},     // page window fails
        {rec(2, 0, 0), rec(2, 100, 100), rec(2, 0, 0), 1.0},     // inside distance gate
        {rec(2, 0, 0), rec(2, 300, 300), rec(2, 0, 0), 0.1},     // outside distance gate
        {rec(4, 10, 10), rec(4, 12, 12), rec(5, 0, 0), 1.0},     // adjacent page passes
        {rec(4, 10, 10), rec(4, 12, 12), rec(6, 0, 0), 0.1},     // two pages away fails
    };
    int idx = 0;
    for (const auto& c : cases) {
        const double got = layout_prior(c.t, c.v, c.s, cfg);
        EXPECT(got == c.want, "layout gate case " + std::to_string(idx) + ": got " + num(got) +
                                  ", want " + num(c.want));
        ++idx;
    }
    return {};
}

bool tuples_identical(const EvidenceTuple& a, const EvidenceTuple& b) {
    auto id = [](const std::optional<Candidate>& s) { return s ? s->chunk_id : std::string(); };
    return id(a.text) == id(b.text) && id(a.image) == id(b.image) &&
           id(a.screenshot) == id(b.screenshot) && a.likelihood == b.likelihood &&
           a.prior == b.prior && a.posterior == b.posterior &&
           a.conflict_aborted == b.conflict_aborted;
}

std::string crit_oracle_ranking() {
    const FusionConfig cfg;
    std::mt19937_64 rng(2027);
    const FusionMode fusions[] = {FusionMode::DempsterShafer, FusionMode::Linear};
    const PriorMode priors[] = {PriorMode::Graph, PriorMode::Layout, PriorMode::None};
    for (int trial = 0; trial < 100; ++trial) {
        const gen::RandomCorpus c = gen::corpus(rng, 5, 10);
        const CandidatePool pool = build_pool(c.text, c.image, c.screenshot, cfg);
        PriorStores stores;
        stores.graph = &c.graph;
        stores.layout = &c.layout;
        const int k = 1 + static_cast<int>(rng() % 30);
        for (FusionMode fusion : fusions) {
            for (PriorMode prior : priors) {
                const auto fast = rank_top_k(pool, k, fusion, prior, stores, cfg);
                const auto slow = brute_force_rank(pool, k, fusion, prior, stores, cfg);
                EXPECT(fast.size() == slow.size(),
                       "trial " + std::to_string(trial) + ": sizes diverge");
                for (std::size_t i = 0; i < fast.size(); ++i)
                    EXPECT(tuples_identical(fast[i], slow[i]),
                           "trial " + std::to_string(trial) + " rank " + std::to_string(i) +
                               " diverges from the dense oracle");

                // floors strictly below the achieved minima must not prune
                if (fast.empty()) continue;
                FusionConfig floored = cfg;
                double min_prior = 1.0, min_lik = 1.0;
                for (const EvidenceTuple& t : fast) {
                    min_prior = std::min(min_prior, t.prior);
                    min_lik = std::min(min_lik, t.likelihood);
                }
                floored.prior_floor = min_prior * 0.9;
                floored.likelihood_floor = min_lik * 0.9;
                const auto pruned = rank_top_k(pool, k, fusion, prior, stores, floored);
                EXPECT(pruned.size() == fast.size(),
                       "trial " + std::to_string(trial) + ": safe floors changed the size");
                for (std::size_t i = 0; i < fast.size(); ++i)
                    EXPECT(tuples_identical(fast[i], pruned[i]),
                           "trial " + std::to_string(trial) + ": safe floors changed rank " +
                               std::to_string(i));
            }
        }
    }
    return {};
}

std::string crit_ranking_invariances() {
    // (a) multiplying every prior by a constant preserves the order
    const FusionConfig cfg;
    std::mt19937_64 rng(2028);
    for (int trial = 0; trial < 50; ++trial) {
        const gen::RandomCorpus c = gen::corpus(rng);
        const CandidatePool pool = build_pool(c.text, c.image, c.screenshot, cfg);
        PriorStores stores;
        stores.graph = &c.graph;
        const auto ranked = rank_top_k(pool, 1 << 20, FusionMode::DempsterShafer,
                                       PriorMode::Graph, stores, cfg);
        for (const double scale : {0.01, 100.0}) {
            std::vector<EvidenceTuple> scaled = ranked;
            for (EvidenceTuple& t : scaled) {
                t.prior *= scale;
                t.posterior = t.likelihood * t.prior;
            }
            std::sort(scaled.begin(), scaled.end(), ranks_before);
            for (std::size_t i = 0; i < ranked.size(); ++i) {
                auto id = [](const std::optional<Candidate>& s) {
                    return s ? s->chunk_id : std::string();
                };
                EXPECT(id(scaled[i].text) == id(ranked[i].text) &&
                           id(scaled[i].image) == id(ranked[i].image) &&
                           id(scaled[i].screenshot) == id(ranked[i].screenshot),
                       "prior scale " + num(scale) + " reordered trial " +
                           std::to_string(trial) + " at rank " + std::to_string(i));
            }
        }
    }

    // (b) serial and parallel CLI runs write byte-identical files
    Pipeline& p = pipeline();
    EXPECT(p.error.empty(), p.error);
    const std::string serial = slurp(p.run_graph);
    const std::string parallel = slurp(p.run_parallel);
    EXPECT(!serial.empty(), "serial run file is empty");
    EXPECT(serial == parallel, "serial and parallel run files differ");
    return {};
}

std::string crit_recall_separation() {
    Pipeline& p = pipeline();
    EXPECT(p.error.empty(), p.error);
    const ParsedReport report = parse_report(p.report_c7);
    EXPECT(report.recall.count("run_baseline.jsonl") == 1 &&
               report.recall.count("run_graph.jsonl") == 1,
           "report lacks the baseline and fused runs");
    const auto& baseline = report.recall.at("run_baseline.jsonl");
    const auto& fused = report.recall.at("run_graph.jsonl");
    EXPECT(fused.at(1) == 1.0, "fused recall@1 is " + num(fused.at(1)) + ", want 1.0");
    EXPECT(baseline.at(1) <= 0.5, "baseline recall@1 is " + num(baseline.at(1)) +
                                      ", expected at most 0.5 by construction");
    for (const auto& [k, v] : fused)
        EXPECT(v >= baseline.at(k), "fused < baseline at k=" + std::to_string(k));
    EXPECT(report.has_delta, "two-run report lacks a delta line");
    for (const auto& [k, v] : report.delta)
        EXPECT(v >= 0.0, "negative fused-minus-baseline delta at k=" + std::to_string(k));
    return {};
}

std::string crit_ablation_ordering() {
    Pipeline& p = pipeline();
    EXPECT(p.error.empty(), p.error);
    const ParsedReport c7 = parse_report(p.report_c7);
    const ParsedReport c8 = parse_report(p.report_c8);
    EXPECT(c8.recall.count("run_layout.jsonl") == 1, "layout report lacks its run");
    const double graph_r1 = c7.recall.at("run_graph.jsonl").at(1);
    const double layout_r1 = c8.recall.at("run_layout.jsonl").at(1);
    const double baseline_r1 = c7.recall.at("run_baseline.jsonl").at(1);
    EXPECT(graph_r1 >= layout_r1 && layout_r1 >= baseline_r1,
           "ordering violated: graph " + num(graph_r1) + ", layout " + num(layout_r1) +
               ", baseline " + num(baseline_r1));
    // the corpus is constructed to separate the three strictly
    EXPECT(graph_r1 == 1.0 && layout_r1 == 0.5 && baseline_r1 == 0.0,
           "expected the constructed 1.0 / 0.5 / 0.0 split, got " + num(graph_r1) + " / " +
               num(layout_r1) + " / " + num(baseline_r1));
    return {};
}

std::string crit_recall_harness() {
    // counting fixture: 6 of 10 queries hit at rank 1, 4 more at rank 7
    std::map<std::string, std::vector<EvidenceTuple>> runs;
    Qrels qrels;
    auto hit_tuple = [](const std::string& doc, int page) {
        EvidenceTuple t;
        Candidate c;
        c.chunk_id = doc + "-t";
        c.doc_id = doc;
        c.modality = Modality::Text;
        c.page = page;
        t.text = c;
        t.likelihood = t.prior = t.posterior = 1.0;
        return t;
    };
    for (int q = 0; q < 10; ++q) {
        const std::string qid = "q" + std::to_string(q);
        qrels.relevant[qid] = {{"good", 1}};
        std::vector<EvidenceTuple> ranked;
        if (q < 6) {
            ranked.push_back(hit_tuple("good", 1));
        } else {
            for (int i = 0; i < 6; ++i) ranked.push_back(hit_tuple("noise" + std::to_string(i), 2));
            ranked.push_back(hit_tuple("good", 1));
        }
        runs[qid] = std::move(ranked);
    }
    const RecallReport fixture = evaluate_runs(runs, qrels, {1, 5, 10});
    EXPECT(fixture.recall.at(5) == 0.6,
           "counting fixture recall@5 is " + num(fixture.recall.at(5)) + ", want exactly 0.6");
    EXPECT(fixture.recall.at(10) == 1.0, "counting fixture recall@10 should be 1.0");

    // monotone in k on randomized rankings, both recall flavors
    std::mt19937_64 rng(2029);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<EvidenceTuple> ranked;
        const int n = 1 + static_cast<int>(rng() % 12);
        for (int i = 0; i < n; ++i)
            ranked.push_back(
                hit_tuple("d" + std::to_string(rng() % 5), static_cast<int>(rng() % 4)));
        std::set<PageRef> relevant;
        for (int i = 0, m = 1 + static_cast<int>(rng() % 3); i < m; ++i)
            relevant.insert({"d" + std::to_string(rng() % 5), static_cast<int>(rng() % 4)});
        const RecallMode mode = (rng() % 2) ? RecallMode::Hit : RecallMode::Set;
        const QueryRecall r = recall_at_k("q", ranked, relevant, {1, 2, 3, 5, 8, 13}, mode);
        double prev = 0.0;
        for (const auto& [k, v] : r.at_k) {
            EXPECT(v >= prev && v >= 0.0 && v <= 1.0,
                   "recall not monotone at trial " + std::to_string(trial) + " k=" +
                       std::to_string(k));
            prev = v;
        }
    }
    return {};
}

std::string crit_cli_contract() {
    Pipeline& p = pipeline();
    EXPECT(p.error.empty(), p.error);

    // byte-identical consecutive runs, and both match the frozen golden file
    const std::string first = slurp(p.run_graph);
    const std::string second = slurp(p.run_graph2);
    EXPECT(!first.empty(), "run file is empty");
    EXPECT(first == second, "two consecutive identical commands wrote different bytes");
    const std::string golden_path = g_data + "/golden/toy_run_default.jsonl";
    const std::string golden = slurp(golden_path);
    EXPECT(!golden.empty(), "golden file missing or empty: " + golden_path);
    EXPECT(first == golden, "run output no longer matches the frozen golden file");

    // malformed line 17 is reported by path and line number, exit code 2
    {
        std::ofstream bad(p.work + "/bad_embeddings.jsonl", std::ios::trunc);
        for (int i = 1; i <= 16; ++i)
            bad << R"({"chunk_id": "c)" << i
                << R"(", "doc_id": "d", "modality": "text", "page": 1, "vector": [1.0, 0.0]})"
                << "\n";
        bad << "{this is not json\n";
    }
    const int rc_bad = shell("cd '" + p.work + "' && '" + g_cli +
                             "' index --embeddings bad_embeddings.jsonl --out never.index "
                             ">/dev/null 2>bad_stderr.txt");
    EXPECT(rc_bad == 2, "malformed input should exit 2, got " + std::to_string(rc_bad));
    const std::string bad_err = slurp(p.work + "/bad_stderr.txt");
    EXPECT(bad_err.find("bad_embeddings.jsonl:17:") != std::string::npos,
           "error message lacks the file:line position: " + bad_err);

    // missing graph store for the graph prior: dependency error, exit code 3
    const int rc_dep = shell("cd '" + p.work + "' && '" + g_cli +
                             "' rerank --index toy.index --queries query_vectors.jsonl "
                             "--prior graph --out never.jsonl >/dev/null 2>/dev/null");
    EXPECT(rc_dep == 3, "missing dependency should exit 3, got " + std::to_string(rc_dep));

    // unreachable embedding endpoint: transport error, exit code 4
    {
        std::ofstream texts(p.work + "/texts.jsonl", std::ios::trunc);
        texts << R"({"id": "q9", "text": "a question"})" << "\n";
    }
    const int rc_net = shell("cd '" + p.work + "' && EVIFUSE_EMBED_ENDPOINT='http://127.0.0.1:9/embed' '" +
                             g_cli +
                             "' rerank --index toy.index --queries query_vectors.jsonl "
                             "--embed-queries texts.jsonl --prior none --out never.jsonl "
                             ">/dev/null 2>/dev/null");
    EXPECT(rc_net == 4, "unreachable endpoint should exit 4, got " + std::to_string(rc_net));

    // and a clean invocation exits 0 (the pipeline already proved this)
    return {};
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 3) {
        std::fprintf(stderr, "usage: %s <cli-binary> <data-dir>\n", argv[0]);
        return 64;
    }
    // commands run from a scratch directory, so both paths must be absolute
    for (const char* arg : {argv[1], argv[2]}) {
        char resolved[PATH_MAX];
        if (!realpath(arg, resolved)) {
            std::fprintf(stderr, "cannot resolve path: %s\n", arg);
            return 64;
        }
        (arg == argv[1] ? g_cli : g_data) = resolved;
    }

    struct Criterion {
        const char* description;
        std::string (*check)();
    };
    const Criterion criteria[] = {
        {"fused likelihood matches the independent reference fold", crit_likelihood_oracle},
        {"mass combination is commutative, associative, closed, with exact vacuous identity",
         crit_mass_algebra},
        {"irreconcilable evidence is zeroed; consistent evidence outscores conflicting",
         crit_conflict_semantics},
        {"prior formulas: edge saturation, triangle symmetry, layout gates",
         crit_prior_formulas},
        {"fast ranking equals the dense oracle; safe pruning floors change nothing",
         crit_oracle_ranking},
        {"order is invariant to prior scaling; serial and parallel files are byte-identical",
         crit_ranking_invariances},
        {"synthetic corpus: fused ranking puts truth at rank 1, the raw baseline cannot",
         crit_recall_separation},
        {"ablation ordering: graph prior >= layout prior >= raw baseline at rank 1",
         crit_ablation_ordering},
        {"recall harness is monotone in k and exact on the counting fixture",
         crit_recall_harness},
        {"CLI round trip is byte-reproducible with positioned errors and documented exit codes",
         crit_cli_contract},
    };

    int failures = 0;
    int id = 1;
    for (const Criterion& c : criteria) {
        std::string detail;
        try {
            detail = c.check();
        } catch (const std::exception& e) {
            detail = std::string("unexpected exception: ") + e.what();
        }
        if (detail.empty()) {
            std::printf("PASS criterion %d: %s\n", id, c.description);
        } else {
            std::printf("FAIL criterion %d: %s — %s\n", id, c.description, detail.c_str());
            ++failures;
        }
        ++id;
    }
    return failures;
}
