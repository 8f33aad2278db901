#include "evifuse/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <set>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"

#include "evifuse/core.hpp"
#include "evifuse/eval.hpp"
#include "evifuse/index.hpp"
#include "evifuse/io.hpp"
#include "evifuse/priors.hpp"
#include "evifuse/ranker.hpp"

namespace evifuse::cli {

namespace {

// ---------------------------------------------------------------- index ---

struct IndexArgs {
    std::string embeddings_path;
    std::string out_path;
};

void run_index(const IndexArgs& args) {
    const std::vector<EmbeddingRecord> records = io::read_embeddings(args.embeddings_path);

    // chunk ids are keys into the layout and graph stores, so they must be
    // unique across modalities, not just within one
    std::set<std::string> all_ids;
    for (const EmbeddingRecord& r : records)
        if (!all_ids.insert(r.chunk_id).second)
            throw DuplicateChunkError("duplicate chunk_id '" + r.chunk_id + "' in " +
                                      args.embeddings_path);

    std::string summary;
    for (Modality m : {Modality::Text, Modality::Image, Modality::Screenshot}) {
        std::vector<EmbeddingRecord> subset;
        for (const EmbeddingRecord& r : records)
            if (r.modality == m) subset.push_back(r);
        if (subset.empty()) continue;
        const ModalityIndex idx = build_index(std::move(subset));  // validates
        summary += " " + to_string(m) + ":" + std::to_string(idx.size()) + "(dim " +
                   std::to_string(idx.dimensionality()) + ")";
    }
    io::write_index_file(args.out_path, records);
    std::cout << "indexed " << records.size() << " records ->" << summary << " -> "
              << args.out_path << "\n";
}

// --------------------------------------------------------------- rerank ---

struct RerankArgs {
    std::string index_path;
    std::string queries_path;
    std::string embed_queries_path;
    std::string out_path;
    std::vector<std::string> query_ids;
    int top_k = 20;
    int pool_text = 1024;
    int pool_image = 512;
    int pool_screenshot = 512;
    std::string fusion = "ds";
    std::string prior = "graph";
    std::string kg_edges_path;
    std::string layout_path;
    std::string reranked_path;
    std::string config_path;
    bool baseline = false;
    int threads = 0;
    FusionConfig cfg;  // assembled: defaults < --config < explicit flags
};

// Looks up the vector for (query, modality): "<qid>#<modality>" wins over
// the shared "<qid>" entry.
const std::vector<double>* find_query_vector(
    const std::map<std::string, std::vector<double>>& vectors, const std::string& qid,
    Modality m) {
    auto it = vectors.find(qid + "#" + to_string(m));
    if (it != vectors.end()) return &it->second;
    it = vectors.find(qid);
    if (it != vectors.end()) return &it->second;
    return nullptr;
}

void run_rerank(const RerankArgs& args) {
    args.cfg.validate();
    if (args.top_k < 1) throw InputError("--top-k must be a positive integer");
    for (int pool : {args.pool_text, args.pool_image, args.pool_screenshot})
        if (pool < 1) throw InputError("pool sizes must be positive integers");

    const FusionMode fusion = fusion_mode_from_string(args.fusion);
    const PriorMode prior_mode = prior_mode_from_string(args.prior);
    if (!args.baseline && prior_mode == PriorMode::Graph && args.kg_edges_path.empty())
        throw DependencyError("--prior graph needs a knowledge-graph store: supply --kg-edges");
    if (!args.baseline && prior_mode == PriorMode::Layout && args.layout_path.empty())
        throw DependencyError("--prior layout needs layout records: supply --layout");

    Execution exec = Execution::Parallel;
    if (args.threads == 1) {
        exec = Execution::Serial;
    } else if (args.threads > 1) {
#ifdef _OPENMP
        omp_set_num_threads(args.threads);
#endif
    }

    // stores
    GraphEdgeStore graph;
    std::map<std::string, LayoutRecord> layout;
    PriorStores stores;
    if (!args.kg_edges_path.empty()) {
        graph = aggregate_relation_weights(io::read_kg_edges(args.kg_edges_path));
        stores.graph = &graph;
    }
    if (!args.layout_path.empty()) {
        layout = io::read_layout(args.layout_path);
        stores.layout = &layout;
    }
    std::map<std::string, std::map<std::string, double>> reranked;
    if (!args.reranked_path.empty()) reranked = io::read_reranked(args.reranked_path);

    // indexes
    const std::vector<EmbeddingRecord> records = io::read_index_file(args.index_path);
    std::map<Modality, ModalityIndex> indexes;
    for (Modality m : {Modality::Text, Modality::Image, Modality::Screenshot}) {
        std::vector<EmbeddingRecord> subset;
        for (const EmbeddingRecord& r : records)
            if (r.modality == m) subset.push_back(r);
        if (!subset.empty()) indexes.emplace(m, build_index(std::move(subset)));
    }

    // query vectors: file-backed, optionally extended through the remote
    // embedding service (endpoint/credential from the environment)
    std::map<std::string, std::vector<double>> query_vectors;
    if (!args.queries_path.empty()) query_vectors = io::read_vectors(args.queries_path);
    if (!args.embed_queries_path.empty()) {
        const char* endpoint = std::getenv("EVIFUSE_EMBED_ENDPOINT");
        if (!endpoint || !*endpoint)
            throw DependencyError(
                "--embed-queries needs a remote embedding service: set EVIFUSE_EMBED_ENDPOINT");
        const char* token = std::getenv("EVIFUSE_EMBED_TOKEN");
        const RemoteProvider provider{endpoint, token ? token : ""};
        const auto entries = io::read_texts(args.embed_queries_path);
        std::vector<std::string> texts;
        texts.reserve(entries.size());
        for (const auto& [id, text] : entries) texts.push_back(text);
        const std::vector<std::vector<double>> vectors = embed(texts, provider);
        for (std::size_t i = 0; i < entries.size(); ++i) {
            if (!query_vectors.emplace(entries[i].first, vectors[i]).second)
                throw InputError("query vector id '" + entries[i].first +
                                 "' supplied both in --queries and --embed-queries");
        }
    }

    // queries to run: explicit --query list, else every base id in the file
    std::vector<std::string> queries = args.query_ids;
    if (queries.empty()) {
        std::set<std::string> base_ids;
        for (const auto& [id, vec] : query_vectors) {
            (void)vec;
            base_ids.insert(id.substr(0, id.find('#')));
        }
        queries.assign(base_ids.begin(), base_ids.end());
    }
    if (queries.empty()) throw InputError("no queries to run (empty query vector file)");

    // manifest
    io::RunManifest manifest;
    // execution mode and thread count are deliberately not recorded: serial
    // and parallel runs must produce byte-identical files
    manifest.mode = {
        {"command", "rerank"},
        {"fusion", args.fusion},
        {"prior", args.prior},
        {"baseline", args.baseline ? "true" : "false"},
        {"top_k", std::to_string(args.top_k)},
        {"pool_text", std::to_string(args.pool_text)},
        {"pool_image", std::to_string(args.pool_image)},
        {"pool_screenshot", std::to_string(args.pool_screenshot)},
    };
    manifest.config = args.cfg;
    manifest.inputs.emplace_back(args.index_path, io::file_digest(args.index_path));
    if (!args.queries_path.empty())
        manifest.inputs.emplace_back(args.queries_path, io::file_digest(args.queries_path));
    for (const std::string& p : {args.kg_edges_path, args.layout_path, args.reranked_path,
                                 args.config_path})
        if (!p.empty()) manifest.inputs.emplace_back(p, io::file_digest(p));
    manifest.timestamp = io::manifest_timestamp();

    // rank
    std::vector<io::RunLine> lines;
    for (const std::string& qid : queries) {
        std::vector<Candidate> text, image, screenshot;
        for (auto& [m, idx] : indexes) {
            const std::vector<double>* qv = find_query_vector(query_vectors, qid, m);
            if (!qv)
                throw InputError("no query vector for query '" + qid + "' (" + to_string(m) +
                                 ")");
            const int pool_size = m == Modality::Text    ? args.pool_text
                                  : m == Modality::Image ? args.pool_image
                                                         : args.pool_screenshot;
            std::vector<Candidate> found = idx.search_top_k(*qv, pool_size, exec);
            if (m == Modality::Text)
                text = std::move(found);
            else if (m == Modality::Image)
                image = std::move(found);
            else
                screenshot = std::move(found);
        }
        auto rr = reranked.find(qid);
        if (rr != reranked.end()) apply_reranked_scores(text, rr->second);
        const CandidatePool pool =
            build_pool(std::move(text), std::move(image), std::move(screenshot), args.cfg);

        if (args.baseline) {
            const std::vector<Candidate> ranked = rank_baseline_raw(pool, args.top_k);
            int rank = 1;
            for (const Candidate& c : ranked)
                lines.push_back(io::RunLine{qid, rank++, as_single_slot_tuple(c)});
        } else {
            const std::vector<EvidenceTuple> ranked =
                rank_top_k(pool, args.top_k, fusion, prior_mode, stores, args.cfg, exec);
            int rank = 1;
            for (const EvidenceTuple& t : ranked) lines.push_back(io::RunLine{qid, rank++, t});
        }
    }

    if (args.out_path.empty()) {
        // mirror the file format on standard output
        const std::string tmp = "/dev/stdout";
        io::write_run_file(tmp, manifest, lines);
    } else {
        io::write_run_file(args.out_path, manifest, lines);
        std::cout << "ranked " << queries.size() << " queries (" << lines.size() << " lines) -> "
                  << args.out_path << "\n";
    }
}

// ----------------------------------------------------------------- eval ---

struct EvalArgs {
    std::vector<std::string> run_paths;
    std::string qrels_path;
    std::string ks_csv = "1,3,5,10,20";
    std::string mode = "hit";
    std::string out_path;
};

std::vector<int> parse_ks(const std::string& csv) {
    std::vector<int> ks;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::size_t pos = 0;
        int k = 0;
        try {
            k = std::stoi(item, &pos);
        } catch (const std::exception&) {
            throw InputError("invalid k '" + item + "' in --ks");
        }
        if (pos != item.size() || k < 1)
            throw InputError("invalid k '" + item + "' in --ks (positive integers only)");
        ks.push_back(k);
    }
    if (ks.empty()) throw InputError("--ks must name at least one cutoff");
    std::sort(ks.begin(), ks.end());
    if (std::adjacent_find(ks.begin(), ks.end()) != ks.end())
        throw InputError("--ks must not repeat cutoffs");
    return ks;
}

void run_eval(const EvalArgs& args) {
    const std::vector<int> ks = parse_ks(args.ks_csv);
    RecallMode mode;
    if (args.mode == "hit")
        mode = RecallMode::Hit;
    else if (args.mode == "set")
        mode = RecallMode::Set;
    else
        throw InputError("unknown recall mode '" + args.mode + "' (expected hit|set)");

    const Qrels qrels = io::read_qrels(args.qrels_path);
    std::vector<std::pair<std::string, RecallReport>> reports;
    for (const std::string& path : args.run_paths) {
        const io::RunFile run = io::read_run_file(path);
        reports.emplace_back(path, evaluate_runs(run.by_query, qrels, ks, mode));
    }

    std::map<int, double> delta;
    const bool have_delta = reports.size() == 2;
    if (have_delta) delta = compare_runs(reports[0].second, reports[1].second);

    // table to standard output
    std::size_t name_width = 4;
    for (const auto& [path, report] : reports) name_width = std::max(name_width, path.size());
    std::printf("%-*s", static_cast<int>(name_width + 2), "run");
    for (int k : ks) std::printf("%9s", ("R@" + std::to_string(k)).c_str());
    std::printf("\n");
    for (const auto& [path, report] : reports) {
        std::printf("%-*s", static_cast<int>(name_width + 2), path.c_str());
        for (int k : ks) std::printf("%9.3f", report.recall.at(k));
        std::printf("\n");
    }
    if (have_delta) {
        std::printf("%-*s", static_cast<int>(name_width + 2), "delta (b-a)");
        for (int k : ks) std::printf("%+9.3f", delta.at(k));
        std::printf("\n");
    }

    if (!args.out_path.empty())
        io::write_report_file(args.out_path, ks, args.mode, reports,
                              have_delta ? &delta : nullptr);
}

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"Bayesian evidence-fusion re-ranking for multimodal retrieval"};
    app.require_subcommand(1);

    IndexArgs index_args;
    CLI::App* cmd_index = app.add_subcommand("index", "Validate embeddings and build the index artifact");
    cmd_index->add_option("--embeddings", index_args.embeddings_path, "embeddings JSONL file")
        ->required();
    cmd_index->add_option("--out", index_args.out_path, "index artifact path")->required();

    RerankArgs rerank_args;
    CLI::App* cmd_rerank = app.add_subcommand("rerank", "Retrieve, fuse and re-rank evidence tuples");
    cmd_rerank->add_option("--index", rerank_args.index_path, "index artifact")->required();
    cmd_rerank->add_option("--queries", rerank_args.queries_path, "query vectors JSONL file");
    cmd_rerank->add_option("--embed-queries", rerank_args.embed_queries_path,
                           "query texts JSONL file embedded via the remote service");
    cmd_rerank->add_option("--out", rerank_args.out_path, "ranked-run output path (default stdout)");
    cmd_rerank->add_option("--query", rerank_args.query_ids, "query id (repeatable; default all)");
    cmd_rerank->add_option("--top-k", rerank_args.top_k, "ranked tuples per query");
    cmd_rerank->add_option("--pool-text", rerank_args.pool_text, "text candidate pool size");
    cmd_rerank->add_option("--pool-image", rerank_args.pool_image, "image candidate pool size");
    cmd_rerank->add_option("--pool-screenshot", rerank_args.pool_screenshot,
                           "screenshot candidate pool size");
    cmd_rerank->add_option("--fusion", rerank_args.fusion, "likelihood fusion: ds|linear");
    cmd_rerank->add_option("--prior", rerank_args.prior, "consistency prior: graph|layout|none");
    cmd_rerank->add_option("--kg-edges", rerank_args.kg_edges_path, "knowledge-graph edges JSONL");
    cmd_rerank->add_option("--layout", rerank_args.layout_path, "layout records JSONL");
    cmd_rerank->add_option("--reranked", rerank_args.reranked_path,
                           "external text-reranker scores JSONL");
    cmd_rerank->add_option("--config", rerank_args.config_path, "config JSON file");
    cmd_rerank->add_flag("--baseline", rerank_args.baseline,
                         "emit the raw-similarity baseline ranking instead");
    cmd_rerank->add_option("--threads", rerank_args.threads,
                           "worker threads (0 = default parallel, 1 = serial)");
    double alpha = 0, beta = 0, kappa = 0, tau = 0, epsilon = 0;
    int tau_page = 0;
    CLI::Option* opt_alpha = cmd_rerank->add_option("--alpha", alpha, "positive-evidence trust");
    CLI::Option* opt_beta = cmd_rerank->add_option("--beta", beta, "negative-evidence trust");
    CLI::Option* opt_kappa = cmd_rerank->add_option("--kappa", kappa, "graph saturation rate");
    CLI::Option* opt_tau = cmd_rerank->add_option("--tau", tau, "layout distance gate");
    CLI::Option* opt_tau_page = cmd_rerank->add_option("--tau-page", tau_page, "page window");
    CLI::Option* opt_epsilon = cmd_rerank->add_option("--epsilon", epsilon, "layout penalty prior");

    EvalArgs eval_args;
    CLI::App* cmd_eval = app.add_subcommand("eval", "Score ranked runs against relevance judgments");
    cmd_eval->add_option("--run", eval_args.run_paths, "ranked-run file (repeatable, max 2)")
        ->required()
        ->expected(1, 2);
    cmd_eval->add_option("--qrels", eval_args.qrels_path, "relevance judgments JSONL")->required();
    cmd_eval->add_option("--ks", eval_args.ks_csv, "comma-separated cutoffs");
    cmd_eval->add_option("--mode", eval_args.mode, "recall flavor: hit|set");
    cmd_eval->add_option("--out", eval_args.out_path, "machine-readable report path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (cmd_index->parsed()) {
            run_index(index_args);
        } else if (cmd_rerank->parsed()) {
            // precedence: defaults < config file < explicit flags
            if (!rerank_args.config_path.empty())
                rerank_args.cfg = io::read_config(rerank_args.config_path, rerank_args.cfg);
            if (opt_alpha->count()) rerank_args.cfg.alpha = alpha;
            if (opt_beta->count()) rerank_args.cfg.beta = beta;
            if (opt_kappa->count()) rerank_args.cfg.kappa = kappa;
            if (opt_tau->count()) rerank_args.cfg.tau = tau;
            if (opt_tau_page->count()) rerank_args.cfg.tau_page = tau_page;
            if (opt_epsilon->count()) rerank_args.cfg.epsilon = epsilon;
            run_rerank(rerank_args);
        } else if (cmd_eval->parsed()) {
            run_eval(eval_args);
        }
    } catch (const TransportError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const DependencyError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace evifuse::cli
