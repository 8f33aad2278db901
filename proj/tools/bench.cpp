// Benchmark comparing serial and OpenMP-parallel execution of the two hot
// kernels (cosine search and tuple ranking) on synthetic data, and checking
// on the way that both paths return identical results.
//
// Usage: evifuse_bench [n_vectors] [dim] [n_docs] [per_doc]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "evifuse/index.hpp"
#include "evifuse/priors.hpp"
#include "evifuse/ranker.hpp"

using namespace evifuse;

namespace {

double now_seconds() {
#ifdef _OPENMP
    return omp_get_wtime();
#else
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
#endif
}

template <typename Fn>
double best_of(int reps, Fn&& fn) {
    double best = 1e300;
    for (int i = 0; i < reps; ++i) {
        const double t0 = now_seconds();
        fn();
        best = std::min(best, now_seconds() - t0);
    }
    return best;
}

std::vector<Candidate> random_candidates(std::mt19937_64& rng, Modality m, int n_docs,
                                         int per_doc) {
    std::uniform_real_distribution<double> score(-1.0, 1.0);
    std::vector<Candidate> out;
    for (int d = 0; d < n_docs; ++d) {
        for (int i = 0; i < per_doc; ++i) {
            Candidate c;
            c.chunk_id = to_string(m) + "-" + std::to_string(d) + "-" + std::to_string(i);
            c.doc_id = "doc" + std::to_string(d);
            c.modality = m;
            c.page = i;
            c.raw_score = score(rng);
            out.push_back(std::move(c));
        }
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    const int n_vectors = argc > 1 ? std::atoi(argv[1]) : 20000;
    const int dim = argc > 2 ? std::atoi(argv[2]) : 128;
    const int n_docs = argc > 3 ? std::atoi(argv[3]) : 40;
    const int per_doc = argc > 4 ? std::atoi(argv[4]) : 8;

    std::mt19937_64 rng(42);
    std::normal_distribution<double> gauss(0.0, 1.0);

    // --- cosine search ---
    std::vector<EmbeddingRecord> records(static_cast<std::size_t>(n_vectors));
    for (int i = 0; i < n_vectors; ++i) {
        EmbeddingRecord& r = records[static_cast<std::size_t>(i)];
        r.chunk_id = "c" + std::to_string(i);
        r.doc_id = "d" + std::to_string(i % 100);
        r.modality = Modality::Text;
        r.page = 0;
        r.vector.resize(static_cast<std::size_t>(dim));
        for (double& x : r.vector) x = gauss(rng);
    }
    const ModalityIndex index = build_index(std::move(records));
    std::vector<double> query(static_cast<std::size_t>(dim));
    for (double& x : query) x = gauss(rng);

    const auto serial_hits = index.search_top_k(query, 100, Execution::Serial);
    const auto parallel_hits = index.search_top_k(query, 100, Execution::Parallel);
    bool same = serial_hits.size() == parallel_hits.size();
    for (std::size_t i = 0; same && i < serial_hits.size(); ++i)
        same = serial_hits[i].chunk_id == parallel_hits[i].chunk_id &&
               serial_hits[i].raw_score == parallel_hits[i].raw_score;

    const double search_serial =
        best_of(5, [&] { (void)index.search_top_k(query, 100, Execution::Serial); });
    const double search_parallel =
        best_of(5, [&] { (void)index.search_top_k(query, 100, Execution::Parallel); });

    std::printf("search_top_k  n=%d dim=%d   serial %8.3f ms   parallel %8.3f ms   speedup %.2fx   identical=%s\n",
                n_vectors, dim, search_serial * 1e3, search_parallel * 1e3,
                search_serial / search_parallel, same ? "yes" : "NO");

    // --- tuple ranking ---
    FusionConfig cfg;
    GraphEdgeStore graph;
    std::uniform_int_distribution<int> pick(0, n_docs * per_doc - 1);
    std::uniform_real_distribution<double> weight(0.0, 5.0);
    std::vector<Candidate> text = random_candidates(rng, Modality::Text, n_docs, per_doc);
    std::vector<Candidate> image = random_candidates(rng, Modality::Image, n_docs, per_doc);
    std::vector<Candidate> shots = random_candidates(rng, Modality::Screenshot, n_docs, per_doc);
    for (int e = 0; e < n_docs * per_doc; ++e)
        graph.add_relation(text[static_cast<std::size_t>(pick(rng))].chunk_id,
                           image[static_cast<std::size_t>(pick(rng))].chunk_id, weight(rng));
    PriorStores stores;
    stores.graph = &graph;
    const CandidatePool pool = build_pool(std::move(text), std::move(image), std::move(shots), cfg);

    const auto serial_rank = rank_top_k(pool, 50, FusionMode::DempsterShafer, PriorMode::Graph,
                                        stores, cfg, Execution::Serial);
    const auto parallel_rank = rank_top_k(pool, 50, FusionMode::DempsterShafer, PriorMode::Graph,
                                          stores, cfg, Execution::Parallel);
    bool rank_same = serial_rank.size() == parallel_rank.size();
    for (std::size_t i = 0; rank_same && i < serial_rank.size(); ++i)
        rank_same = serial_rank[i].posterior == parallel_rank[i].posterior &&
                    serial_rank[i].text->chunk_id == parallel_rank[i].text->chunk_id;

    const double rank_serial = best_of(5, [&] {
        (void)rank_top_k(pool, 50, FusionMode::DempsterShafer, PriorMode::Graph, stores, cfg,
                         Execution::Serial);
    });
    const double rank_parallel = best_of(5, [&] {
        (void)rank_top_k(pool, 50, FusionMode::DempsterShafer, PriorMode::Graph, stores, cfg,
                         Execution::Parallel);
    });

    std::printf("rank_top_k    tuples=%d      serial %8.3f ms   parallel %8.3f ms   speedup %.2fx   identical=%s\n",
                n_docs * per_doc * per_doc * per_doc, rank_serial * 1e3, rank_parallel * 1e3,
                rank_serial / rank_parallel, rank_same ? "yes" : "NO");

#ifdef _OPENMP
    std::printf("openmp: max threads %d\n", omp_get_max_threads());
#else
    std::printf("openmp: not enabled in this build\n");
#endif
    return (same && rank_same) ? 0 : 1;
}
