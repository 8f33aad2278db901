#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "evifuse/core.hpp"

namespace evifuse {

/// One embedded chunk as stored in a modality index.
struct EmbeddingRecord {
    std::string chunk_id;
    std::string doc_id;
    Modality modality = Modality::Text;
    int page = 0;
    std::optional<BBox> bbox;
    std::vector<double> vector;
};

/// Immutable brute-force cosine index over the records of one modality.
/// Build validates the corpus; searches are exact and deterministic
/// (ties broken by ingestion order).
class ModalityIndex {
public:
    Modality modality() const { return modality_; }
    std::size_t dimensionality() const { return dim_; }
    std::size_t size() const { return records_.size(); }
    const std::vector<EmbeddingRecord>& records() const { return records_; }

    /// Exact top-k by cosine similarity. Scores are computed per record
    /// (in parallel when exec is Parallel), then sorted stably so equal
    /// scores keep ingestion order; serial and parallel runs return
    /// identical results. Throws DimensionMismatchError when the query
    /// dimensionality differs, ZeroVectorError on a zero query,
    /// EmptyIndexError on an empty index, InputError when k < 1.
    std::vector<Candidate> search_top_k(const std::vector<double>& query, int k,
                                        Execution exec = Execution::Serial) const;

    friend ModalityIndex build_index(std::vector<EmbeddingRecord> records);

private:
    Modality modality_ = Modality::Text;
    std::size_t dim_ = 0;
    std::vector<EmbeddingRecord> records_;
};

/// Validates and freezes a record set into an index: homogeneous modality
/// and dimensionality, no duplicate chunk ids, no zero vectors. Throws
/// DimensionMismatchError, DuplicateChunkError, ZeroVectorError, or
/// EmptyIndexError (empty record set).
ModalityIndex build_index(std::vector<EmbeddingRecord> records);

/// File-backed embedding lookup: exact match from input id to vector.
struct OfflineProvider {
    std::map<std::string, std::vector<double>> vectors;
};

/// Remote embedding service. One POST {"inputs": [...]} to the endpoint,
/// expecting {"vectors": [[...], ...]}; a failed attempt is retried once.
struct RemoteProvider {
    std::string endpoint;    // e.g. http://host:port/embed
    std::string auth_token;  // sent as a bearer credential when non-empty
};

using ProviderConfig = std::variant<OfflineProvider, RemoteProvider>;

/// Maps input ids/texts to embedding vectors through the given provider.
/// When expected_dim is nonzero every returned vector must have that
/// dimensionality. Throws UnknownInputError (offline miss), TransportError
/// (unreachable endpoint / HTTP failure after one retry),
/// MalformedResponseError (response violates the wire contract), and
/// DimensionMismatchError.
std::vector<std::vector<double>> embed(const std::vector<std::string>& inputs,
                                       const ProviderConfig& provider,
                                       std::size_t expected_dim = 0);

}  // namespace evifuse
