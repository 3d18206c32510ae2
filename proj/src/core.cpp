#include "mmd/core.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"

namespace mmd {

namespace {

using nlohmann::json;

bool is_ascii_word_char(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

// Multi-byte UTF-8 whitespace code points we strip in addition to ASCII.
bool is_unicode_space_at(std::string_view s, std::size_t i, std::size_t& len) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    if (c == 0xC2 && i + 1 < s.size() &&
        static_cast<unsigned char>(s[i + 1]) == 0xA0) {  // NBSP
        len = 2;
        return true;
    }
    if (c == 0xE2 && i + 2 < s.size()) {
        unsigned char c1 = static_cast<unsigned char>(s[i + 1]);
        unsigned char c2 = static_cast<unsigned char>(s[i + 2]);
        // U+2000..U+200A, U+2028, U+2029, U+202F, U+205F
        if (c1 == 0x80 && ((c2 >= 0x80 && c2 <= 0x8A) || c2 == 0xA8 || c2 == 0xA9 || c2 == 0xAF)) {
            len = 3;
            return true;
        }
        if (c1 == 0x81 && c2 == 0x9F) {
            len = 3;
            return true;
        }
    }
    if (c == 0xE3 && i + 2 < s.size() &&
        static_cast<unsigned char>(s[i + 1]) == 0x80 &&
        static_cast<unsigned char>(s[i + 2]) == 0x80) {  // ideographic space
        len = 3;
        return true;
    }
    len = 0;
    return false;
}

bool is_space_at(std::string_view s, std::size_t i, std::size_t& len) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
        len = 1;
        return true;
    }
    if (c >= 0x80) return is_unicode_space_at(s, i, len);
    len = 0;
    return false;
}

}  // namespace

bool EmbeddingVec::all_finite() const {
    return std::all_of(values.begin(), values.end(),
                       [](double x) { return std::isfinite(x); });
}

const std::vector<Perspective>& all_perspectives() {
    static const std::vector<Perspective> order = {
        Perspective::sentiment, Perspective::propaganda, Perspective::consistency,
        Perspective::object, Perspective::description};
    return order;
}

std::string_view to_string(Perspective p) {
    switch (p) {
        case Perspective::sentiment: return "sentiment";
        case Perspective::propaganda: return "propaganda";
        case Perspective::consistency: return "consistency";
        case Perspective::object: return "object";
        case Perspective::description: return "description";
    }
    throw std::invalid_argument("unknown perspective value");
}

Perspective perspective_from_string(std::string_view name) {
    for (Perspective p : all_perspectives()) {
        if (to_string(p) == name) return p;
    }
    throw std::invalid_argument("unknown perspective: " + std::string(name));
}

// ---------------------------------------------------------------------------
// Rng

std::uint64_t Rng::next_u64() {
    // splitmix64
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double Rng::next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::next_below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("next_below: n must be positive");
    // Rejection sampling keeps the draw unbiased.
    std::uint64_t limit = ~0ULL - (~0ULL % n);
    std::uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return x % n;
}

double Rng::next_gaussian() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u = 0.0;
    do {
        u = next_double();
    } while (u <= 0.0);
    double v = next_double();
    double r = std::sqrt(-2.0 * std::log(u));
    spare_ = r * std::sin(2.0 * M_PI * v);
    have_spare_ = true;
    return r * std::cos(2.0 * M_PI * v);
}

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t derive_seed(std::uint64_t root_seed, std::string_view name) {
    Rng rng(root_seed ^ fnv1a64(name));
    return rng.next_u64();
}

// ---------------------------------------------------------------------------
// Text utilities

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    std::size_t i = 0;
    while (i < text.size()) {
        unsigned char c = static_cast<unsigned char>(text[i]);
        if (is_ascii_word_char(c)) {
            current.push_back(static_cast<char>(
                c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c));
            ++i;
        } else if (c >= 0x80) {
            std::size_t ws_len = 0;
            if (is_unicode_space_at(text, i, ws_len)) {
                if (!current.empty()) {
                    tokens.push_back(std::move(current));
                    current.clear();
                }
                i += ws_len;
            } else {
                current.push_back(text[i]);
                ++i;
            }
        } else {
            if (!current.empty()) {
                tokens.push_back(std::move(current));
                current.clear();
            }
            ++i;
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

std::string_view trim_whitespace(std::string_view text) {
    std::size_t begin = 0;
    while (begin < text.size()) {
        std::size_t len = 0;
        if (!is_space_at(text, begin, len)) break;
        begin += len;
    }
    // Scan forward to find the end of the last non-space run; multi-byte
    // whitespace cannot be detected walking backwards.
    std::size_t end = begin;
    std::size_t i = begin;
    while (i < text.size()) {
        std::size_t len = 0;
        if (is_space_at(text, i, len)) {
            i += len;
        } else {
            ++i;
            end = i;
        }
    }
    return text.substr(begin, end - begin);
}

std::string collapse_whitespace(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    std::size_t i = 0;
    while (i < text.size()) {
        std::size_t len = 0;
        if (is_space_at(text, i, len)) {
            pending_space = !out.empty();
            i += len;
        } else {
            if (pending_space) {
                out.push_back(' ');
                pending_space = false;
            }
            out.push_back(text[i]);
            ++i;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Vector math

double cosine_similarity(const EmbeddingVec& a, const EmbeddingVec& b) {
    if (a.dim() != b.dim()) {
        throw std::invalid_argument("cosine_similarity: dimension mismatch");
    }
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        dot += a.values[i] * b.values[i];
        na += a.values[i] * a.values[i];
        nb += b.values[i] * b.values[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    double c = dot / (std::sqrt(na) * std::sqrt(nb));
    return std::clamp(c, -1.0, 1.0);
}

EmbeddingVec mean_embedding(const std::vector<EmbeddingVec>& vecs) {
    if (vecs.empty()) {
        throw std::invalid_argument("mean_embedding: empty input");
    }
    const std::size_t dim = vecs.front().dim();
    std::vector<double> sum(dim, 0.0);
    std::vector<double> comp(dim, 0.0);
    for (const auto& v : vecs) {
        if (v.dim() != dim) {
            throw std::invalid_argument("mean_embedding: dimension mismatch");
        }
        for (std::size_t i = 0; i < dim; ++i) {
            double y = v.values[i] - comp[i];
            double t = sum[i] + y;
            comp[i] = (t - sum[i]) - y;
            sum[i] = t;
        }
    }
    const double inv_n = 1.0 / static_cast<double>(vecs.size());
    for (double& x : sum) x *= inv_n;
    return EmbeddingVec(std::move(sum));
}

// ---------------------------------------------------------------------------
// Operations

std::vector<std::vector<std::size_t>> make_folds(std::size_t n_instances,
                                                 std::uint64_t seed) {
    if (n_instances < kNumFolds) {
        throw std::invalid_argument("make_folds: need at least 5 instances, got " +
                                    std::to_string(n_instances));
    }
    std::vector<std::size_t> order(n_instances);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_seed(seed, "fold-shuffle"));
    rng.shuffle(order);

    std::vector<std::vector<std::size_t>> folds(kNumFolds);
    for (std::size_t i = 0; i < order.size(); ++i) {
        folds[i % kNumFolds].push_back(order[i]);
    }
    return folds;
}

std::optional<std::string> validate_instance(const NewsInstance& inst,
                                             std::size_t expected_image_dim) {
    if (inst.id.empty()) return "empty id";
    if (trim_whitespace(inst.text).empty()) return "empty text";
    if (inst.image_features.dim() != expected_image_dim) {
        return "dimension mismatch: image features have dim " +
               std::to_string(inst.image_features.dim()) + ", expected " +
               std::to_string(expected_image_dim);
    }
    if (!inst.image_features.all_finite()) return "non-finite image feature";
    if (inst.label != Label::real && inst.label != Label::fake) return "invalid label";
    return std::nullopt;
}

std::optional<std::string> validate_dataset(const Dataset& ds) {
    if (ds.folds.size() != kNumFolds) {
        return "expected 5 folds, got " + std::to_string(ds.folds.size());
    }
    std::vector<int> seen(ds.instances.size(), 0);
    std::size_t min_size = ds.instances.size(), max_size = 0, total = 0;
    for (const auto& fold : ds.folds) {
        min_size = std::min(min_size, fold.size());
        max_size = std::max(max_size, fold.size());
        total += fold.size();
        for (std::size_t idx : fold) {
            if (idx >= ds.instances.size()) return "fold index out of range";
            if (seen[idx]++) return "folds overlap at index " + std::to_string(idx);
        }
    }
    if (total != ds.instances.size()) return "folds do not cover all instances";
    if (max_size > min_size + 1) return "fold sizes differ by more than 1";
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Dataset I/O

std::vector<NewsInstance> load_dataset_jsonl(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open dataset file: " + path);

    std::vector<NewsInstance> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim_whitespace(line).empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ConfigError(path + ":" + std::to_string(line_no) +
                              ": bad JSON: " + e.what());
        }
        NewsInstance inst;
        try {
            inst.id = j.at("id").get<std::string>();
            inst.text = j.at("text").get<std::string>();
            inst.image_features =
                EmbeddingVec(j.at("image_features").get<std::vector<double>>());
            int label = j.at("label").get<int>();
            if (label != 0 && label != 1) {
                throw ConfigError(path + ":" + std::to_string(line_no) +
                                  ": label must be 0 or 1");
            }
            inst.label = static_cast<Label>(label);
            if (j.contains("image_ref")) {
                inst.image_ref = j.at("image_ref").get<std::string>();
            }
        } catch (const json::exception& e) {
            throw ConfigError(path + ":" + std::to_string(line_no) +
                              ": bad instance: " + e.what());
        }
        out.push_back(std::move(inst));
    }
    return out;
}

void save_dataset_jsonl(const std::vector<NewsInstance>& instances,
                        const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write dataset file: " + path);
    for (const auto& inst : instances) {
        json j;
        j["id"] = inst.id;
        j["text"] = inst.text;
        j["image_features"] = inst.image_features.values;
        j["label"] = static_cast<int>(inst.label);
        if (inst.image_ref) j["image_ref"] = *inst.image_ref;
        out << j.dump() << "\n";
    }
}

}  // namespace mmd
