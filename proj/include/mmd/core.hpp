#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mmd {

// ---------------------------------------------------------------------------
// Errors

// External neural service could not be reached after the configured retries.
struct ProviderUnavailable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Provider answered but produced no usable content.
struct EmptyResponse : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Training loss left the finite range.
struct TrainingDiverged : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad run configuration or unreadable input file.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Domain types

enum class Label : int { real = 0, fake = 1 };

struct EmbeddingVec {
    std::vector<double> values;

    EmbeddingVec() = default;
    explicit EmbeddingVec(std::vector<double> v) : values(std::move(v)) {}

    std::size_t dim() const { return values.size(); }
    bool all_finite() const;
};

struct NewsInstance {
    std::string id;
    std::string text;
    EmbeddingVec image_features;
    Label label = Label::real;
    std::optional<std::string> image_ref;
};

struct Sentence {
    std::string text;
    std::size_t index = 0;
    std::optional<double> factuality;  // [0,1]
    std::optional<double> relevance;   // [-1,1]
};

enum class Perspective : int {
    sentiment = 0,
    propaganda = 1,
    consistency = 2,
    object = 3,
    description = 4,
};

inline constexpr std::size_t kNumPerspectives = 5;

// Canonical pipeline order: sentiment, propaganda, consistency, object, description.
const std::vector<Perspective>& all_perspectives();

std::string_view to_string(Perspective p);
Perspective perspective_from_string(std::string_view name);

struct Rationale {
    Perspective perspective = Perspective::sentiment;
    std::string analysis_turn;
    std::string judgment_turn;
    std::vector<Sentence> sentences;
};

inline constexpr std::size_t kNumFolds = 5;

struct Dataset {
    std::vector<NewsInstance> instances;
    std::vector<std::vector<std::size_t>> folds;  // 5 disjoint index sets
};

// ---------------------------------------------------------------------------
// Deterministic randomness
//
// All randomness in the pipeline flows from one root seed through named
// sub-seeds, independent of the standard library's distribution choices.

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64();
    // Uniform in [0, 1).
    double next_double();
    // Uniform in [0, n); n > 0.
    std::uint64_t next_below(std::uint64_t n);
    // Standard normal via Box-Muller.
    double next_gaussian();

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

  private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

std::uint64_t fnv1a64(std::string_view data);
std::uint64_t derive_seed(std::uint64_t root_seed, std::string_view name);

// ---------------------------------------------------------------------------
// Shared text utilities

// Lowercased word tokens: runs of ASCII alphanumerics (lowercased) and
// non-ASCII UTF-8 sequences. Punctuation separates tokens.
std::vector<std::string> tokenize(std::string_view text);

// Trims ASCII and common Unicode whitespace from both ends.
std::string_view trim_whitespace(std::string_view text);

// Collapses every whitespace run to a single space and trims the ends.
std::string collapse_whitespace(std::string_view text);

// ---------------------------------------------------------------------------
// Shared vector math

// cos(u,v) = <u,v>/(|u||v|); zero-norm input yields 0. Result clamped to [-1,1].
double cosine_similarity(const EmbeddingVec& a, const EmbeddingVec& b);

// Component-wise mean with Kahan compensation so permuting the inputs moves
// the result by well under 1e-9.
EmbeddingVec mean_embedding(const std::vector<EmbeddingVec>& vecs);

// ---------------------------------------------------------------------------
// Operations

// Seeded shuffle, then round-robin chunking into 5 balanced folds.
// Requires n_instances >= 5.
std::vector<std::vector<std::size_t>> make_folds(std::size_t n_instances,
                                                 std::uint64_t seed);

// nullopt when every NewsInstance invariant holds, otherwise a description
// of the first violated one.
std::optional<std::string> validate_instance(const NewsInstance& inst,
                                             std::size_t expected_image_dim);

// Checks fold partition invariants (disjoint, complete, balanced).
std::optional<std::string> validate_dataset(const Dataset& ds);

// ---------------------------------------------------------------------------
// Dataset file I/O (JSONL, one instance per line)

std::vector<NewsInstance> load_dataset_jsonl(const std::string& path);
void save_dataset_jsonl(const std::vector<NewsInstance>& instances,
                        const std::string& path);

}  // namespace mmd
