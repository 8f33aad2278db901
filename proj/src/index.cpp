#include "evifuse/index.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "httplib.h"
#include "json.hpp"

namespace evifuse {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

double norm(const std::vector<double>& v) { return std::sqrt(dot(v, v)); }

}  // namespace

ModalityIndex build_index(std::vector<EmbeddingRecord> records) {
    if (records.empty()) throw EmptyIndexError("cannot build an index from zero records");
    ModalityIndex idx;
    idx.modality_ = records.front().modality;
    idx.dim_ = records.front().vector.size();
    std::set<std::string> seen;
    for (const EmbeddingRecord& r : records) {
        if (r.modality != idx.modality_)
            throw InputError("index records must share one modality (chunk " + r.chunk_id + ")");
        if (r.vector.size() != idx.dim_)
            throw DimensionMismatchError("chunk " + r.chunk_id + " has dimensionality " +
                                         std::to_string(r.vector.size()) + ", index expects " +
                                         std::to_string(idx.dim_));
        for (double x : r.vector)
            if (!std::isfinite(x))
                throw InputError("chunk " + r.chunk_id + " has a non-finite vector component");
        if (norm(r.vector) <= 0.0)
            throw ZeroVectorError("chunk " + r.chunk_id + " has a zero vector");
        if (!seen.insert(r.chunk_id).second)
            throw DuplicateChunkError("duplicate chunk_id '" + r.chunk_id + "' in index");
    }
    idx.records_ = std::move(records);
    return idx;
}

std::vector<Candidate> ModalityIndex::search_top_k(const std::vector<double>& query, int k,
                                                   Execution exec) const {
    if (records_.empty()) throw EmptyIndexError("search on an empty index");
    if (k < 1) throw InputError("k must be a positive integer");
    if (query.size() != dim_)
        throw DimensionMismatchError("query has dimensionality " + std::to_string(query.size()) +
                                     ", index expects " + std::to_string(dim_));
    const double qn = norm(query);
    if (qn <= 0.0) throw ZeroVectorError("query vector has zero norm");

    const std::int64_t n = static_cast<std::int64_t>(records_.size());
    std::vector<double> scores(records_.size());
#pragma omp parallel for schedule(static) if (exec == Execution::Parallel)
    for (std::int64_t i = 0; i < n; ++i) {
        const std::vector<double>& rv = records_[static_cast<std::size_t>(i)].vector;
        scores[static_cast<std::size_t>(i)] = dot(query, rv) / (qn * norm(rv));
    }

    std::vector<std::size_t> order(records_.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(k), order.size());
    std::vector<Candidate> out;
    out.reserve(take);
    for (std::size_t i = 0; i < take; ++i) {
        const EmbeddingRecord& r = records_[order[i]];
        Candidate c;
        c.chunk_id = r.chunk_id;
        c.doc_id = r.doc_id;
        c.modality = r.modality;
        c.page = r.page;
        c.bbox = r.bbox;
        c.raw_score = scores[order[i]];
        out.push_back(std::move(c));
    }
    return out;
}

namespace {

std::vector<std::vector<double>> embed_offline(const std::vector<std::string>& inputs,
                                               const OfflineProvider& provider) {
    std::vector<std::vector<double>> out;
    out.reserve(inputs.size());
    for (const std::string& id : inputs) {
        auto it = provider.vectors.find(id);
        if (it == provider.vectors.end())
            throw UnknownInputError("offline provider has no vector for input '" + id + "'");
        out.push_back(it->second);
    }
    return out;
}

// Splits "http://host:port/path" into the client base and the request path.
std::pair<std::string, std::string> split_endpoint(const std::string& endpoint) {
    const auto scheme = endpoint.find("://");
    if (scheme == std::string::npos)
        throw DependencyError("embedding endpoint must be an http(s) URL, got '" + endpoint + "'");
    const auto path_start = endpoint.find('/', scheme + 3);
    if (path_start == std::string::npos) return {endpoint, "/"};
    return {endpoint.substr(0, path_start), endpoint.substr(path_start)};
}

std::vector<std::vector<double>> embed_remote(const std::vector<std::string>& inputs,
                                              const RemoteProvider& provider) {
    if (provider.endpoint.empty())
        throw DependencyError("remote embedding requested but no endpoint configured");
    const auto [base, path] = split_endpoint(provider.endpoint);
    httplib::Client client(base);
    client.set_connection_timeout(5, 0);
    client.set_read_timeout(15, 0);
    httplib::Headers headers;
    if (!provider.auth_token.empty())
        headers.emplace("Authorization", "Bearer " + provider.auth_token);

    nlohmann::json body;
    body["inputs"] = inputs;
    const std::string payload = body.dump();

    httplib::Result res;
    for (int attempt = 0; attempt < 2; ++attempt) {  // one retry
        res = client.Post(path, headers, payload, "application/json");
        if (res && res->status == 200) break;
    }
    if (!res)
        throw TransportError("embedding endpoint " + provider.endpoint +
                             " unreachable: " + httplib::to_string(res.error()));
    if (res->status != 200)
        throw TransportError("embedding endpoint " + provider.endpoint + " returned HTTP " +
                             std::to_string(res->status));

    nlohmann::json parsed;
    try {
        parsed = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
        throw MalformedResponseError(std::string("embedding response is not valid JSON: ") +
                                     e.what());
    }
    if (!parsed.is_object() || !parsed.contains("vectors") || !parsed["vectors"].is_array())
        throw MalformedResponseError("embedding response must be {\"vectors\": [[...], ...]}");
    const auto& vecs = parsed["vectors"];
    if (vecs.size() != inputs.size())
        throw MalformedResponseError("embedding response has " + std::to_string(vecs.size()) +
                                     " vectors for " + std::to_string(inputs.size()) + " inputs");
    std::vector<std::vector<double>> out;
    out.reserve(vecs.size());
    for (const auto& v : vecs) {
        if (!v.is_array())
            throw MalformedResponseError("embedding response vector is not an array");
        std::vector<double> vec;
        vec.reserve(v.size());
        for (const auto& x : v) {
            if (!x.is_number())
                throw MalformedResponseError("embedding response vector holds a non-number");
            vec.push_back(x.get<double>());
        }
        out.push_back(std::move(vec));
    }
    return out;
}

}  // namespace

std::vector<std::vector<double>> embed(const std::vector<std::string>& inputs,
                                       const ProviderConfig& provider,
                                       std::size_t expected_dim) {
    std::vector<std::vector<double>> out =
        std::holds_alternative<OfflineProvider>(provider)
            ? embed_offline(inputs, std::get<OfflineProvider>(provider))
            : embed_remote(inputs, std::get<RemoteProvider>(provider));
    if (expected_dim != 0) {
        for (std::size_t i = 0; i < out.size(); ++i) {
            if (out[i].size() != expected_dim)
                throw DimensionMismatchError(
                    "embedding for input '" + inputs[i] + "' has dimensionality " +
                    std::to_string(out[i].size()) + ", expected " + std::to_string(expected_dim));
        }
    }
    return out;
}

}  // namespace evifuse
