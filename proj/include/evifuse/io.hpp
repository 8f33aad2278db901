#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "evifuse/core.hpp"
#include "evifuse/eval.hpp"
#include "evifuse/index.hpp"
#include "evifuse/priors.hpp"
#include "evifuse/ranker.hpp"

namespace evifuse::io {

// All record files are line-delimited JSON: one object per line. Parse
// errors carry "path:line:" prefixes. Schemas are documented in README.md
// and are part of the external contract.

/// 64-bit FNV-1a over a byte string.
std::uint64_t fnv1a64(const std::string& bytes);

/// Digest of a file's content, rendered as "fnv1a64:<16 hex digits>".
std::string file_digest(const std::string& path);

// --- readers -------------------------------------------------------------

/// {"chunk_id","doc_id","modality","page","bbox"?, "vector"}
std::vector<EmbeddingRecord> read_embeddings(const std::string& path);

/// {"u","v","weight"?} — weight defaults to 1.0
std::vector<GraphRelation> read_kg_edges(const std::string& path);

/// {"chunk_id","doc_id","page","bbox","page_width","page_height"}
std::map<std::string, LayoutRecord> read_layout(const std::string& path);

/// {"query_id","doc_id","page"}
Qrels read_qrels(const std::string& path);

/// {"id","vector"} — id-keyed vector store (offline embeddings, queries)
std::map<std::string, std::vector<double>> read_vectors(const std::string& path);

/// {"query_id","chunk_id","score"} — external text-reranker scores
std::map<std::string, std::map<std::string, double>> read_reranked(const std::string& path);

/// {"id","text"} — inputs for the remote embedding service, in file order
std::vector<std::pair<std::string, std::string>> read_texts(const std::string& path);

/// Whole-file JSON object overlaying the given base config; unknown keys
/// are rejected. The result is validated before being returned.
FusionConfig read_config(const std::string& path, FusionConfig base);

FusionConfig config_from_json(const nlohmann::json& j, FusionConfig base);
nlohmann::ordered_json config_to_json(const FusionConfig& cfg);

// --- index artifact ------------------------------------------------------

/// Writes the validated record set as an index artifact: a header line
/// {"kind":"evifuse_index", ...} followed by one embedding record per line.
void write_index_file(const std::string& path, const std::vector<EmbeddingRecord>& records);

/// Reads an index artifact back; validates the header.
std::vector<EmbeddingRecord> read_index_file(const std::string& path);

// --- ranked-run files ----------------------------------------------------

/// Reproducibility header embedded in every ranked-output file.
struct RunManifest {
    std::vector<std::pair<std::string, std::string>> mode;    // e.g. {"fusion","ds"}
    FusionConfig config;
    std::vector<std::pair<std::string, std::string>> inputs;  // path -> digest
    std::string timestamp;
};

/// UTC timestamp for manifests. Honors SOURCE_DATE_EPOCH (seconds since
/// the epoch) when set, so archived runs can be byte-reproducible.
std::string manifest_timestamp();

/// One ranked result row of one query.
struct RunLine {
    std::string query_id;
    int rank = 0;
    EvidenceTuple tuple;
};

/// Line 1: {"manifest": {...}}; then one row per ranked tuple with
/// per-slot chunk ids, pages and scores.
void write_run_file(const std::string& path, const RunManifest& manifest,
                    const std::vector<RunLine>& lines);

/// A parsed ranked-run file: the raw manifest plus per-query rankings
/// (insertion order of the file preserved within each query).
struct RunFile {
    nlohmann::json manifest;
    std::map<std::string, std::vector<EvidenceTuple>> by_query;
};

RunFile read_run_file(const std::string& path);

/// Machine-readable recall report: header line, one line per run with its
/// per-k and per-query recall, and a delta line when exactly two runs are
/// compared (delta == nullptr otherwise).
void write_report_file(const std::string& path, const std::vector<int>& ks,
                       const std::string& mode_name,
                       const std::vector<std::pair<std::string, RecallReport>>& runs,
                       const std::map<int, double>* delta);

}  // namespace evifuse::io
