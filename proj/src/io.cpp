#include "evifuse/io.hpp"

#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>

namespace evifuse::io {

using nlohmann::json;
using nlohmann::ordered_json;

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 1099511628211ull;
    }
    return h;
}

std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(buf.str())));
    return std::string("fnv1a64:") + hex;
}

namespace {

// Runs `fn` on every non-blank line parsed as JSON; any failure is rethrown
// as InputError prefixed with "path:line:".
template <typename Fn>
std::size_t for_each_record(const std::string& path, Fn&& fn) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    std::string line;
    int line_no = 0;
    std::size_t records = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            json parsed = json::parse(line);
            if (!parsed.is_object()) throw InputError("record must be a JSON object");
            fn(parsed);
            ++records;
        } catch (const std::exception& e) {
            throw InputError(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return records;
}

const json& require(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) throw InputError(std::string("missing required field '") + key + "'");
    return *it;
}

std::string req_string(const json& j, const char* key) {
    const json& v = require(j, key);
    if (!v.is_string()) throw InputError(std::string("field '") + key + "' must be a string");
    return v.get<std::string>();
}

int req_int(const json& j, const char* key) {
    const json& v = require(j, key);
    if (!v.is_number_integer()) throw InputError(std::string("field '") + key + "' must be an integer");
    return v.get<int>();
}

double to_finite_double(const json& v, const char* key) {
    if (!v.is_number()) throw InputError(std::string("field '") + key + "' must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw InputError(std::string("field '") + key + "' must be finite");
    return d;
}

double req_double(const json& j, const char* key) { return to_finite_double(require(j, key), key); }

std::vector<double> parse_vector(const json& v, const char* key) {
    if (!v.is_array() || v.empty())
        throw InputError(std::string("field '") + key + "' must be a non-empty array of numbers");
    std::vector<double> out;
    out.reserve(v.size());
    for (const json& x : v) out.push_back(to_finite_double(x, key));
    return out;
}

BBox parse_bbox(const json& v) {
    if (!v.is_array() || v.size() != 4)
        throw InputError("field 'bbox' must be an array [x0, y0, x1, y1]");
    BBox b;
    b.x0 = to_finite_double(v[0], "bbox");
    b.y0 = to_finite_double(v[1], "bbox");
    b.x1 = to_finite_double(v[2], "bbox");
    b.y1 = to_finite_double(v[3], "bbox");
    if (b.x0 > b.x1 || b.y0 > b.y1)
        throw InputError("field 'bbox' must satisfy x0 <= x1 and y0 <= y1");
    return b;
}

int req_page(const json& j) {
    const int page = req_int(j, "page");
    if (page < 0) throw InputError("field 'page' must be non-negative");
    return page;
}

EmbeddingRecord parse_embedding_record(const json& j) {
    EmbeddingRecord r;
    r.chunk_id = req_string(j, "chunk_id");
    r.doc_id = req_string(j, "doc_id");
    r.modality = modality_from_string(req_string(j, "modality"));
    r.page = req_page(j);
    if (j.contains("bbox") && !j["bbox"].is_null()) r.bbox = parse_bbox(j["bbox"]);
    r.vector = parse_vector(require(j, "vector"), "vector");
    return r;
}

ordered_json bbox_to_json(const BBox& b) { return ordered_json::array({b.x0, b.y0, b.x1, b.y1}); }

ordered_json embedding_record_to_json(const EmbeddingRecord& r) {
    ordered_json j;
    j["chunk_id"] = r.chunk_id;
    j["doc_id"] = r.doc_id;
    j["modality"] = to_string(r.modality);
    j["page"] = r.page;
    if (r.bbox) j["bbox"] = bbox_to_json(*r.bbox);
    j["vector"] = r.vector;
    return j;
}

}  // namespace

std::vector<EmbeddingRecord> read_embeddings(const std::string& path) {
    std::vector<EmbeddingRecord> records;
    const std::size_t n =
        for_each_record(path, [&](const json& j) { records.push_back(parse_embedding_record(j)); });
    if (n == 0) throw InputError(path + ": empty input (no embedding records)");
    return records;
}

std::vector<GraphRelation> read_kg_edges(const std::string& path) {
    std::vector<GraphRelation> relations;
    for_each_record(path, [&](const json& j) {
        GraphRelation r;
        r.u = req_string(j, "u");
        r.v = req_string(j, "v");
        if (j.contains("weight") && !j["weight"].is_null()) {
            r.weight = to_finite_double(j["weight"], "weight");
            if (r.weight < 0.0) throw InputError("field 'weight' must be non-negative");
        }
        relations.push_back(std::move(r));
    });
    return relations;
}

std::map<std::string, LayoutRecord> read_layout(const std::string& path) {
    std::map<std::string, LayoutRecord> layout;
    for_each_record(path, [&](const json& j) {
        LayoutRecord r;
        r.chunk_id = req_string(j, "chunk_id");
        r.doc_id = req_string(j, "doc_id");
        r.page = req_page(j);
        r.bbox = parse_bbox(require(j, "bbox"));
        r.page_width = req_double(j, "page_width");
        r.page_height = req_double(j, "page_height");
        if (r.page_width <= 0.0 || r.page_height <= 0.0)
            throw InputError("page_width and page_height must be positive");
        if (!layout.emplace(r.chunk_id, r).second)
            throw InputError("duplicate layout record for chunk '" + r.chunk_id + "'");
    });
    return layout;
}

Qrels read_qrels(const std::string& path) {
    Qrels qrels;
    const std::size_t n = for_each_record(path, [&](const json& j) {
        const std::string qid = req_string(j, "query_id");
        qrels.relevant[qid].emplace(req_string(j, "doc_id"), req_page(j));
    });
    if (n == 0) throw InputError(path + ": empty input (no relevance judgments)");
    return qrels;
}

std::map<std::string, std::vector<double>> read_vectors(const std::string& path) {
    std::map<std::string, std::vector<double>> vectors;
    for_each_record(path, [&](const json& j) {
        const std::string id = req_string(j, "id");
        if (!vectors.emplace(id, parse_vector(require(j, "vector"), "vector")).second)
            throw InputError("duplicate vector id '" + id + "'");
    });
    return vectors;
}

std::map<std::string, std::map<std::string, double>> read_reranked(const std::string& path) {
    std::map<std::string, std::map<std::string, double>> scores;
    for_each_record(path, [&](const json& j) {
        const std::string qid = req_string(j, "query_id");
        const std::string chunk = req_string(j, "chunk_id");
        if (!scores[qid].emplace(chunk, req_double(j, "score")).second)
            throw InputError("duplicate reranked score for query '" + qid + "', chunk '" + chunk +
                             "'");
    });
    return scores;
}

std::vector<std::pair<std::string, std::string>> read_texts(const std::string& path) {
    std::vector<std::pair<std::string, std::string>> texts;
    std::set<std::string> seen;
    for_each_record(path, [&](const json& j) {
        const std::string id = req_string(j, "id");
        if (!seen.insert(id).second) throw InputError("duplicate text id '" + id + "'");
        texts.emplace_back(id, req_string(j, "text"));
    });
    return texts;
}

FusionConfig config_from_json(const json& j, FusionConfig base) {
    if (!j.is_object()) throw InputError("config must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (key == "alpha") base.alpha = to_finite_double(value, "alpha");
        else if (key == "beta") base.beta = to_finite_double(value, "beta");
        else if (key == "conflict_threshold")
            base.conflict_threshold = to_finite_double(value, "conflict_threshold");
        else if (key == "kappa") base.kappa = to_finite_double(value, "kappa");
        else if (key == "tau") base.tau = to_finite_double(value, "tau");
        else if (key == "tau_page") {
            if (!value.is_number_integer()) throw InputError("tau_page must be an integer");
            base.tau_page = value.get<int>();
        } else if (key == "epsilon") base.epsilon = to_finite_double(value, "epsilon");
        else if (key == "linear_weights") {
            if (!value.is_object()) throw InputError("linear_weights must be an object");
            std::map<Modality, double> weights;
            for (const auto& [mod, w] : value.items())
                weights[modality_from_string(mod)] = to_finite_double(w, "linear_weights");
            base.linear_weights = std::move(weights);
        } else if (key == "prior_floor") base.prior_floor = to_finite_double(value, "prior_floor");
        else if (key == "likelihood_floor")
            base.likelihood_floor = to_finite_double(value, "likelihood_floor");
        else if (key == "default_prior")
            base.default_prior = to_finite_double(value, "default_prior");
        else if (key == "fixed_stats") {
            if (!value.is_object()) throw InputError("fixed_stats must be an object");
            std::map<Modality, NormalizationStats> stats;
            for (const auto& [mod, pair] : value.items()) {
                if (!pair.is_array() || pair.size() != 2)
                    throw InputError("fixed_stats entries must be [s_min, s_max]");
                NormalizationStats st;
                st.modality = modality_from_string(mod);
                st.s_min = to_finite_double(pair[0], "fixed_stats");
                st.s_max = to_finite_double(pair[1], "fixed_stats");
                stats[st.modality] = st;
            }
            base.fixed_stats = std::move(stats);
        } else {
            throw InputError("unknown config key '" + key + "'");
        }
    }
    base.validate();
    return base;
}

FusionConfig read_config(const std::string& path, FusionConfig base) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    json parsed;
    try {
        parsed = json::parse(in);
    } catch (const json::exception& e) {
        throw InputError(path + ": " + e.what());
    }
    try {
        return config_from_json(parsed, std::move(base));
    } catch (const std::exception& e) {
        throw InputError(path + ": " + e.what());
    }
}

ordered_json config_to_json(const FusionConfig& cfg) {
    ordered_json j;
    j["alpha"] = cfg.alpha;
    j["beta"] = cfg.beta;
    j["conflict_threshold"] = cfg.conflict_threshold;
    j["kappa"] = cfg.kappa;
    j["tau"] = cfg.tau;
    j["tau_page"] = cfg.tau_page;
    j["epsilon"] = cfg.epsilon;
    ordered_json weights;
    for (const auto& [mod, w] : cfg.linear_weights) weights[to_string(mod)] = w;
    j["linear_weights"] = weights;
    j["prior_floor"] = cfg.prior_floor;
    j["likelihood_floor"] = cfg.likelihood_floor;
    j["default_prior"] = cfg.default_prior;
    if (!cfg.fixed_stats.empty()) {
        ordered_json stats;
        for (const auto& [mod, st] : cfg.fixed_stats)
            stats[to_string(mod)] = ordered_json::array({st.s_min, st.s_max});
        j["fixed_stats"] = stats;
    }
    return j;
}

void write_index_file(const std::string& path, const std::vector<EmbeddingRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path);
    ordered_json header;
    header["kind"] = "evifuse_index";
    header["version"] = 1;
    ordered_json counts, dims;
    for (Modality m : {Modality::Text, Modality::Image, Modality::Screenshot}) {
        std::size_t count = 0, dim = 0;
        for (const EmbeddingRecord& r : records) {
            if (r.modality != m) continue;
            ++count;
            dim = r.vector.size();
        }
        if (count > 0) {
            counts[to_string(m)] = count;
            dims[to_string(m)] = dim;
        }
    }
    header["counts"] = counts;
    header["dims"] = dims;
    out << header.dump() << "\n";
    for (const EmbeddingRecord& r : records) out << embedding_record_to_json(r).dump() << "\n";
    if (!out) throw InputError("failed writing " + path);
}

std::vector<EmbeddingRecord> read_index_file(const std::string& path) {
    std::vector<EmbeddingRecord> records;
    bool header_seen = false;
    for_each_record(path, [&](const json& j) {
        if (!header_seen) {
            if (!j.contains("kind") || j["kind"] != "evifuse_index")
                throw InputError("not an index artifact (missing kind=evifuse_index header)");
            header_seen = true;
            return;
        }
        records.push_back(parse_embedding_record(j));
    });
    if (!header_seen) throw InputError(path + ": empty input (no index header)");
    if (records.empty()) throw InputError(path + ": index artifact holds no records");
    return records;
}

std::string manifest_timestamp() {
    std::time_t t = 0;
    if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"))
        t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
    else
        t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

namespace {

ordered_json slot_to_json(const std::optional<Candidate>& slot) {
    if (!slot) return nullptr;
    ordered_json j;
    j["chunk_id"] = slot->chunk_id;
    j["page"] = slot->page;
    j["raw_score"] = slot->raw_score;
    j["norm_score"] = slot->norm_score;
    return j;
}

std::optional<Candidate> slot_from_json(const json& j, Modality modality,
                                        const std::string& doc_id) {
    if (j.is_null()) return std::nullopt;
    Candidate c;
    c.chunk_id = req_string(j, "chunk_id");
    c.doc_id = doc_id;
    c.modality = modality;
    c.page = req_page(j);
    c.raw_score = req_double(j, "raw_score");
    c.norm_score = req_double(j, "norm_score");
    return c;
}

}  // namespace

void write_run_file(const std::string& path, const RunManifest& manifest,
                    const std::vector<RunLine>& lines) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path);
    ordered_json m;
    ordered_json mode;
    for (const auto& [key, value] : manifest.mode) mode[key] = value;
    m["mode"] = mode;
    m["config"] = config_to_json(manifest.config);
    ordered_json inputs = ordered_json::array();
    for (const auto& [p, digest] : manifest.inputs)
        inputs.push_back(ordered_json{{"path", p}, {"digest", digest}});
    m["inputs"] = inputs;
    m["timestamp"] = manifest.timestamp;
    out << ordered_json{{"manifest", m}}.dump() << "\n";

    for (const RunLine& line : lines) {
        ordered_json j;
        j["query_id"] = line.query_id;
        j["rank"] = line.rank;
        j["doc_id"] = line.tuple.doc_id();
        j["likelihood"] = line.tuple.likelihood;
        j["prior"] = line.tuple.prior;
        j["posterior"] = line.tuple.posterior;
        j["conflict_aborted"] = line.tuple.conflict_aborted;
        j["text"] = slot_to_json(line.tuple.text);
        j["image"] = slot_to_json(line.tuple.image);
        j["screenshot"] = slot_to_json(line.tuple.screenshot);
        out << j.dump() << "\n";
    }
    if (!out) throw InputError("failed writing " + path);
}

RunFile read_run_file(const std::string& path) {
    RunFile run;
    bool header_seen = false;
    for_each_record(path, [&](const json& j) {
        if (!header_seen) {
            if (!j.contains("manifest"))
                throw InputError("not a ranked-run file (missing manifest header line)");
            run.manifest = j["manifest"];
            header_seen = true;
            return;
        }
        const std::string qid = req_string(j, "query_id");
        const std::string doc = req_string(j, "doc_id");
        EvidenceTuple t;
        t.text = slot_from_json(require(j, "text"), Modality::Text, doc);
        t.image = slot_from_json(require(j, "image"), Modality::Image, doc);
        t.screenshot = slot_from_json(require(j, "screenshot"), Modality::Screenshot, doc);
        t.likelihood = req_double(j, "likelihood");
        t.prior = req_double(j, "prior");
        t.posterior = req_double(j, "posterior");
        if (j.contains("conflict_aborted") && j["conflict_aborted"].is_boolean())
            t.conflict_aborted = j["conflict_aborted"].get<bool>();
        run.by_query[qid].push_back(std::move(t));
    });
    if (!header_seen) throw InputError(path + ": empty input (no manifest header)");
    return run;
}

void write_report_file(const std::string& path, const std::vector<int>& ks,
                       const std::string& mode_name,
                       const std::vector<std::pair<std::string, RecallReport>>& runs,
                       const std::map<int, double>* delta) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path);
    ordered_json header;
    header["kind"] = "evifuse_report";
    header["ks"] = ks;
    header["mode"] = mode_name;
    header["timestamp"] = manifest_timestamp();
    out << header.dump() << "\n";
    for (const auto& [run_path, report] : runs) {
        ordered_json j;
        j["run"] = run_path;
        ordered_json recall;
        for (int k : report.ks) recall[std::to_string(k)] = report.recall.at(k);
        j["recall"] = recall;
        ordered_json per_query = ordered_json::array();
        for (const QueryRecall& qr : report.per_query) {
            ordered_json q;
            q["query_id"] = qr.query_id;
            ordered_json at_k;
            for (int k : report.ks) at_k[std::to_string(k)] = qr.at_k.at(k);
            q["at_k"] = at_k;
            per_query.push_back(q);
        }
        j["per_query"] = per_query;
        out << j.dump() << "\n";
    }
    if (delta) {
        ordered_json j;
        ordered_json d;
        for (const auto& [k, diff] : *delta) d[std::to_string(k)] = diff;
        j["delta"] = d;
        out << j.dump() << "\n";
    }
    if (!out) throw InputError("failed writing " + path);
}

}  // namespace evifuse::io
