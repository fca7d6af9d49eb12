#pragma once
// Uniform model-invocation contract: a scripted deterministic backend for
// tests/replay and an OpenAI-compatible chat-completions HTTP client.

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "intake/json_util.hpp"

namespace intake::backends {

enum class RoleTag {
    AssessorCoT,
    PatientCoT,
    PatientChat,
    EvaluatorCoT,
    EvaluatorChat,
    Diagnostician,
    Extractor,
    Rater,
};
std::string to_string(RoleTag tag);

enum class Speaker { System, User, Assistant };

struct Message {
    Speaker speaker = Speaker::System;
    std::string text;
};

enum class ContractKind { FreeText, JsonSchema };

struct ResponseContract {
    ContractKind kind = ContractKind::FreeText;
    std::string schema;  // registry name, e.g. "patient_cot"

    static ResponseContract free_text() { return {ContractKind::FreeText, ""}; }
    static ResponseContract json(const std::string& name) {
        return {ContractKind::JsonSchema, name};
    }
};

struct DecodeParams {
    double temperature = 0.2;
    int max_tokens = 1024;
    std::optional<std::uint64_t> seed;
};

struct ModelRequest {
    RoleTag role_tag = RoleTag::PatientChat;
    std::vector<Message> messages;  // non-empty, first speaker = System
    ResponseContract contract;
    DecodeParams decode;
};

struct Usage {
    std::size_t prompt_tokens = 0;
    std::size_t completion_tokens = 0;
};

struct ModelResponse {
    std::string text;
    std::optional<Json> parsed;  // present iff contract was JsonSchema and validation passed
    Usage usage;
    int attempt_count = 1;
};

// Named JSON output contracts (the shapes printed in the agent prompts).
// Returns a list of human-readable violations; empty means valid.
std::vector<std::string> validate_contract(const std::string& schema, const Json& value);

class ModelBackend {
public:
    virtual ~ModelBackend() = default;

    // Validates structured contracts with one repair reprompt: at most two
    // model calls per JsonSchema request, never an unvalidated parse.
    ModelResponse complete(const ModelRequest& request);

    virtual std::string id() const = 0;
    // True when appraise() should use the deterministic cue-word tables
    // instead of a model call.
    virtual bool lexicon_appraisal() const { return false; }

    Usage cumulative_usage() const;

protected:
    struct RawResult {
        std::string text;
        int calls = 1;  // model calls spent, transport retries included
    };
    // One logical model call. attempt is 1-based across schema repairs.
    virtual RawResult raw_complete(const ModelRequest& request, int attempt) = 0;

private:
    mutable std::mutex usage_mutex_;
    Usage usage_total_;
};

using BackendPtr = std::shared_ptr<ModelBackend>;

// Deterministic playback backend. Script format: JSON object mapping
// "RoleTag/index" (index = per-role call sequence, 0-based) to either a string
// or {"text": ..., "malformed_prefix_count": n}. "RoleTag/*" supplies a
// fallback entry for any index without an explicit key. "__options__" may set
// {"lexicon_appraisal": bool} (default true).
class ScriptedBackend final : public ModelBackend {
public:
    static std::shared_ptr<ScriptedBackend> load(const std::string& path);
    static std::shared_ptr<ScriptedBackend> from_json(const Json& script, std::string name);

    // Fresh per-session playback cursor over the same script.
    std::shared_ptr<ScriptedBackend> clone_fresh() const;

    std::string id() const override { return "scripted:" + name_; }
    bool lexicon_appraisal() const override { return lexicon_appraisal_; }

protected:
    RawResult raw_complete(const ModelRequest& request, int attempt) override;

private:
    struct Entry {
        std::string text;
        int malformed_prefix_count = 0;
    };
    std::string name_;
    std::map<std::string, Entry> entries_;
    bool lexicon_appraisal_ = true;
    std::map<std::string, int> cursors_;  // role tag -> next call index
    std::mutex mutex_;
};

struct RetryPolicy {
    int max_retries = 3;      // transport-level retries (rate limit / 5xx)
    int backoff_ms = 50;      // doubled per retry
};

struct HttpBackendConfig {
    std::string endpoint_url;  // e.g. "http://localhost:8080/v1"
    std::string model_name;
    std::string auth_env;      // name of the env var holding the credential; "" = no auth
    int timeout_ms = 30000;
    RetryPolicy retry;
};

class HttpBackend final : public ModelBackend {
public:
    explicit HttpBackend(HttpBackendConfig config);

    std::string id() const override { return "http:" + config_.model_name + "@" + config_.endpoint_url; }

protected:
    RawResult raw_complete(const ModelRequest& request, int attempt) override;

private:
    HttpBackendConfig config_;
    std::string credential_;  // resolved once at construction
};

// Role-indexed backend handles with a default. A session requires every role
// it invokes to resolve.
class BackendSet {
public:
    BackendSet() = default;
    explicit BackendSet(BackendPtr default_backend) : default_(std::move(default_backend)) {}

    void set_default(BackendPtr backend) { default_ = std::move(backend); }
    void set_role(RoleTag role, BackendPtr backend) { per_role_[role] = std::move(backend); }

    ModelBackend& get(RoleTag role) const;
    std::vector<std::string> backend_ids() const;
    std::vector<ModelBackend*> distinct_backends() const;

private:
    BackendPtr default_;
    std::map<RoleTag, BackendPtr> per_role_;
};

}  // namespace intake::backends
