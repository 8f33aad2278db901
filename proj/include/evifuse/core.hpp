#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace evifuse {

// ---------------------------------------------------------------------------
// Errors. The CLI maps these onto process exit codes: InputError -> 2,
// DependencyError -> 3, TransportError -> 4. Everything else is a bug.
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A caller violated an input contract (bad file, bad value, bad shape).
struct InputError : Error {
    using Error::Error;
};

/// A required external resource is not configured or not reachable by design
/// (e.g. remote embedding endpoint requested but no URL given).
struct DependencyError : Error {
    using Error::Error;
};

/// A configured remote dependency failed at runtime (network, HTTP, protocol).
struct TransportError : Error {
    using Error::Error;
};

struct EmptyPoolError : InputError { using InputError::InputError; };
struct ScoreRangeError : InputError { using InputError::InputError; };
struct EmptyScoresError : InputError { using InputError::InputError; };
struct MissingWeightError : InputError { using InputError::InputError; };
struct NegativeWeightError : InputError { using InputError::InputError; };
struct DimensionMismatchError : InputError { using InputError::InputError; };
struct DuplicateChunkError : InputError { using InputError::InputError; };
struct ZeroVectorError : InputError { using InputError::InputError; };
struct EmptyIndexError : InputError { using InputError::InputError; };
struct UnknownInputError : InputError { using InputError::InputError; };
struct EmptyPoolsError : InputError { using InputError::InputError; };
struct UnknownQueryError : InputError { using InputError::InputError; };
struct GridMismatchError : InputError { using InputError::InputError; };
struct MalformedResponseError : TransportError { using TransportError::TransportError; };

// ---------------------------------------------------------------------------
// Basic retrieval types.
// ---------------------------------------------------------------------------

enum class Modality { Text = 0, Image = 1, Screenshot = 2 };

std::string to_string(Modality m);
Modality modality_from_string(const std::string& s);

/// Axis-aligned bounding box in page coordinates (origin top-left).
struct BBox {
    double x0 = 0.0;
    double y0 = 0.0;
    double x1 = 0.0;
    double y1 = 0.0;

    double center_x() const { return 0.5 * (x0 + x1); }
    double center_y() const { return 0.5 * (y0 + y1); }
};

/// One retrieved chunk for one query, in one modality pool.
struct Candidate {
    std::string chunk_id;
    std::string doc_id;
    Modality modality = Modality::Text;
    int page = 0;
    std::optional<BBox> bbox;
    double raw_score = 0.0;   // similarity as produced by the retriever
    double norm_score = 0.0;  // min-max normalized into [0, 1]
};

/// Min/max of the raw scores of one per-query, per-modality candidate pool.
struct NormalizationStats {
    Modality modality = Modality::Text;
    double s_min = 0.0;
    double s_max = 0.0;
};

/// Serial runs a kernel single-threaded; Parallel lets OpenMP split the loop.
/// Both must produce byte-identical ranked output.
enum class Execution { Serial, Parallel };

// ---------------------------------------------------------------------------
// Mass functions over the binary frame {relevant, not-relevant}.
// ---------------------------------------------------------------------------

/// Basic probability assignment: mass on "yes", "no" and the whole frame.
/// Construct through make_mass so the simplex constraints are checked once.
struct MassFunction {
    double y = 0.0;
    double n = 0.0;
    double omega = 1.0;
};

/// Validates components are non-negative and sum to 1 within 1e-9, then
/// returns the mass. Throws InputError otherwise.
MassFunction make_mass(double y, double n, double omega);

/// The ignorance element: all mass on the frame. Neutral for combination.
MassFunction vacuous_mass();

// ---------------------------------------------------------------------------
// Configuration shared by fusion, priors and ranking.
// ---------------------------------------------------------------------------

struct FusionConfig {
    // evidence strength scaling for the per-modality mass functions
    double alpha = 0.7;
    double beta = 0.6;
    // combined evidence with pairwise conflict at or above this is discarded
    double conflict_threshold = 0.999;
    // knowledge-graph edge weight -> probability rate
    double kappa = 0.1;
    // layout distance gate, as a multiple of the page diagonal
    double tau = 2.0;
    // layout page window: pages must differ by strictly less than this
    int tau_page = 2;
    // prior assigned to tuples that fail the layout gates
    double epsilon = 0.1;
    // weights for the linear (weighted-average) fusion fallback
    std::map<Modality, double> linear_weights = {
        {Modality::Text, 1.0 / 3.0},
        {Modality::Image, 1.0 / 3.0},
        {Modality::Screenshot, 1.0 / 3.0},
    };
    // tuples below either floor are pruned before sorting
    double prior_floor = 0.0;
    double likelihood_floor = 0.0;
    // prior used when a tuple has fewer than two populated slots
    double default_prior = 1.0;
    // optional fixed min/max per modality; empty means derive from the pool
    std::map<Modality, NormalizationStats> fixed_stats;

    /// Throws InputError when any field is outside its documented domain.
    void validate() const;
};

// ---------------------------------------------------------------------------
// Score normalization.
// ---------------------------------------------------------------------------

/// Min/max raw score over the candidates of one modality in the pool.
/// Throws EmptyPoolError when the pool holds no candidate of that modality;
/// a single-element or constant pool yields s_min == s_max.
NormalizationStats compute_stats(const std::vector<Candidate>& pool, Modality modality);

/// Min-max normalization clamped to [0, 1]. A degenerate pool
/// (s_min == s_max) maps every score to 0.5.
double normalize_score(double raw, const NormalizationStats& stats);

}  // namespace evifuse
