#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mmd/core.hpp"

namespace mmd::providers {

enum class Role { system, user, assistant };

std::string_view to_string(Role r);

struct ChatTurn {
    Role role = Role::user;
    std::string content;
    // Image reference forwarded to vision-capable endpoints; mocks fold the
    // reference string into their input.
    std::optional<std::string> image_attachment;
};

struct ProviderConfig {
    std::string endpoint_url;
    std::string model_name = "mock-chat";
    int timeout_ms = 30000;
    double temperature = 0.0;
    int max_retries = 3;
};

// ---------------------------------------------------------------------------
// Service interfaces. Every implementation must be safe for concurrent calls.

class ChatProvider {
  public:
    virtual ~ChatProvider() = default;
    // history must be nonempty and end with a user turn.
    virtual std::string complete(const std::vector<ChatTurn>& history) const = 0;
};

class EmbeddingProvider {
  public:
    virtual ~EmbeddingProvider() = default;
    virtual EmbeddingVec embed(const std::string& text) const = 0;
    virtual std::size_t dim() const = 0;
};

// Scores a (sentence, document) pair into [0,1].
class PairScorer {
  public:
    virtual ~PairScorer() = default;
    virtual double score(const std::string& sentence,
                         const std::string& document) const = 0;
};

// Throws std::invalid_argument unless history is nonempty, ends with a user
// turn, and every user/assistant turn has nonempty content.
void validate_chat_history(const std::vector<ChatTurn>& history);

// ---------------------------------------------------------------------------
// Deterministic offline mocks

// Emits a short multi-sentence analysis echoing the most frequent word tokens
// of the user turns, plus one synthetic off-topic sentence. Pure function of
// the history.
class MockChatProvider : public ChatProvider {
  public:
    explicit MockChatProvider(ProviderConfig cfg = {}) : cfg_(std::move(cfg)) {}
    std::string complete(const std::vector<ChatTurn>& history) const override;

  private:
    ProviderConfig cfg_;
};

// Hashes each token into a primary bucket (weight 1) plus a token-specific
// low-weight secondary bucket, then L2-normalizes. The secondary signature
// keeps distinct single tokens from colliding while primary-bucket counts
// preserve overlap sensitivity.
class MockEmbeddingProvider : public EmbeddingProvider {
  public:
    MockEmbeddingProvider(std::string profile, std::size_t dim)
        : profile_(std::move(profile)), dim_(dim) {
        if (dim_ == 0) throw std::invalid_argument("embedding dim must be positive");
    }
    EmbeddingVec embed(const std::string& text) const override;
    std::size_t dim() const override { return dim_; }

  private:
    std::string profile_;
    std::size_t dim_;
};

// stance: |tokens(s) ∩ tokens(d)| / |tokens(s)|
// summary: |tokens(s) ∩ tokens(d)| / |tokens(d)|, capped at 1
enum class PairScoreKind { stance, summary };

class MockPairScorer : public PairScorer {
  public:
    explicit MockPairScorer(PairScoreKind kind) : kind_(kind) {}
    double score(const std::string& sentence,
                 const std::string& document) const override;

  private:
    PairScoreKind kind_;
};

// ---------------------------------------------------------------------------
// HTTP clients (OpenAI-compatible wire format)
//
// Chat:       POST {endpoint}/chat/completions
// Embeddings: POST {endpoint}/embeddings
// Pair score: POST {endpoint}/score  {"model","task","sentence","document"}
//
// The API key is read from MMD_API_KEY (falling back to OPENAI_API_KEY) and
// sent as a bearer token when present.

class HttpChatProvider : public ChatProvider {
  public:
    explicit HttpChatProvider(ProviderConfig cfg) : cfg_(std::move(cfg)) {}
    std::string complete(const std::vector<ChatTurn>& history) const override;

  private:
    ProviderConfig cfg_;
};

class HttpEmbeddingProvider : public EmbeddingProvider {
  public:
    HttpEmbeddingProvider(ProviderConfig cfg, std::string model);
    EmbeddingVec embed(const std::string& text) const override;
    // 0 until the first successful call pins the profile dimension.
    std::size_t dim() const override;

  private:
    ProviderConfig cfg_;
    std::string model_;
    mutable std::size_t seen_dim_ = 0;
};

class HttpPairScorer : public PairScorer {
  public:
    HttpPairScorer(ProviderConfig cfg, PairScoreKind kind)
        : cfg_(std::move(cfg)), kind_(kind) {}
    double score(const std::string& sentence,
                 const std::string& document) const override;

  private:
    ProviderConfig cfg_;
    PairScoreKind kind_;
};

// ---------------------------------------------------------------------------
// Provider bundle used by the pipeline stages.

struct ProviderSet {
    std::shared_ptr<ChatProvider> chat;
    std::shared_ptr<EmbeddingProvider> embed_fusion;      // detector text encoder
    std::shared_ptr<EmbeddingProvider> embed_similarity;  // relevance/diversity encoder
    std::shared_ptr<PairScorer> stance;
    std::shared_ptr<PairScorer> summary;
};

}  // namespace mmd::providers
