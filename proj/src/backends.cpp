#include "intake/backends.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <thread>

#define CPPHTTPLIB_NO_EXCEPTIONS
#include <httplib.h>

namespace intake::backends {

std::string to_string(RoleTag tag) {
    switch (tag) {
        case RoleTag::AssessorCoT: return "AssessorCoT";
        case RoleTag::PatientCoT: return "PatientCoT";
        case RoleTag::PatientChat: return "PatientChat";
        case RoleTag::EvaluatorCoT: return "EvaluatorCoT";
        case RoleTag::EvaluatorChat: return "EvaluatorChat";
        case RoleTag::Diagnostician: return "Diagnostician";
        case RoleTag::Extractor: return "Extractor";
        case RoleTag::Rater: return "Rater";
    }
    return "PatientChat";
}

namespace {

std::size_t message_tokens(const std::vector<Message>& messages) {
    std::size_t n = 0;
    for (const Message& m : messages) n += whitespace_tokens(m.text);
    return n;
}

void check_request(const ModelRequest& request) {
    if (request.messages.empty())
        fail(ErrorCode::InvalidArgument, "request has no messages");
    if (request.messages.front().speaker != Speaker::System)
        fail(ErrorCode::InvalidArgument, "first message must be the system prompt");
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (const std::string& p : parts) {
        if (!out.empty()) out += sep;
        out += p;
    }
    return out;
}

}  // namespace

Usage ModelBackend::cumulative_usage() const {
    std::lock_guard<std::mutex> lock(usage_mutex_);
    return usage_total_;
}

ModelResponse ModelBackend::complete(const ModelRequest& request) {
    check_request(request);

    ModelResponse response;
    response.usage.prompt_tokens = message_tokens(request.messages);
    auto record_usage = [this](const Usage& usage) {
        std::lock_guard<std::mutex> lock(usage_mutex_);
        usage_total_.prompt_tokens += usage.prompt_tokens;
        usage_total_.completion_tokens += usage.completion_tokens;
    };

    if (request.contract.kind == ContractKind::FreeText) {
        RawResult raw = raw_complete(request, 1);
        response.text = std::move(raw.text);
        response.usage.completion_tokens = whitespace_tokens(response.text);
        response.attempt_count = raw.calls;
        record_usage(response.usage);
        return response;
    }

    // JsonSchema: at most two model calls; second call embeds the validation
    // errors as a repair prompt.
    ModelRequest attempt_request = request;
    std::vector<std::string> errors;
    response.attempt_count = 0;
    for (int attempt = 1; attempt <= 2; ++attempt) {
        RawResult raw = raw_complete(attempt_request, attempt);
        response.text = std::move(raw.text);
        response.attempt_count += raw.calls;
        response.usage.completion_tokens += whitespace_tokens(response.text);

        Json parsed = Json::parse(response.text, nullptr, false);
        if (parsed.is_discarded()) {
            errors = {"reply is not valid JSON"};
        } else {
            errors = validate_contract(request.contract.schema, parsed);
            if (errors.empty()) {
                response.parsed = std::move(parsed);
                record_usage(response.usage);
                return response;
            }
        }
        if (attempt == 1) {
            attempt_request.messages.push_back({Speaker::Assistant, response.text});
            attempt_request.messages.push_back(
                {Speaker::User,
                 "Your previous reply failed validation: " + join(errors, "; ") +
                     ". Reply again with only a valid JSON object in the required shape."});
        }
    }
    fail(ErrorCode::SchemaViolation,
         "contract '" + request.contract.schema + "' unmet after repair: " + join(errors, "; "));
}

// ---------------------------------------------------------------------------
// ScriptedBackend

std::shared_ptr<ScriptedBackend> ScriptedBackend::load(const std::string& path) {
    return from_json(load_json_file(path), path);
}

std::shared_ptr<ScriptedBackend> ScriptedBackend::from_json(const Json& script, std::string name) {
    if (!script.is_object()) fail(ErrorCode::ParseError, name + ": script must be a JSON object");
    auto backend = std::shared_ptr<ScriptedBackend>(new ScriptedBackend());
    backend->name_ = std::move(name);
    for (auto& [key, value] : script.items()) {
        if (key == "__options__") {
            backend->lexicon_appraisal_ = value.value("lexicon_appraisal", true);
            continue;
        }
        Entry entry;
        if (value.is_string()) {
            entry.text = value.get<std::string>();
        } else if (value.is_object()) {
            entry.text = require_field(value, "text", backend->name_).get<std::string>();
            entry.malformed_prefix_count = value.value("malformed_prefix_count", 0);
        } else {
            fail(ErrorCode::ParseError, backend->name_ + ": entry '" + key + "' must be string or object");
        }
        backend->entries_[key] = std::move(entry);
    }
    return backend;
}

std::shared_ptr<ScriptedBackend> ScriptedBackend::clone_fresh() const {
    auto backend = std::shared_ptr<ScriptedBackend>(new ScriptedBackend());
    backend->name_ = name_;
    backend->entries_ = entries_;
    backend->lexicon_appraisal_ = lexicon_appraisal_;
    return backend;
}

ModelBackend::RawResult ScriptedBackend::raw_complete(const ModelRequest& request, int attempt) {
    std::lock_guard<std::mutex> lock(mutex_);
    const std::string role = to_string(request.role_tag);
    // Repair attempts replay the same entry; only fresh requests advance.
    int index = cursors_[role];
    if (attempt == 1) cursors_[role] = index + 1;
    else index -= 1;

    const std::string key = role + "/" + std::to_string(index);
    auto it = entries_.find(key);
    if (it == entries_.end()) it = entries_.find(role + "/*");
    if (it == entries_.end())
        fail(ErrorCode::UnscriptedRequest, "no script entry for " + key + " in " + name_);

    if (attempt <= it->second.malformed_prefix_count)
        return {"<<not-json>> " + it->second.text, 1};
    return {it->second.text, 1};
}

// ---------------------------------------------------------------------------
// HttpBackend

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
    if (!config_.auth_env.empty()) {
        const char* value = std::getenv(config_.auth_env.c_str());
        if (!value || !*value)
            fail(ErrorCode::AuthFailure,
                 "credential env var '" + config_.auth_env + "' is not set");
        credential_ = value;
    }
}

namespace {

// Split "http://host:port/prefix" into client base and path prefix.
std::pair<std::string, std::string> split_endpoint(const std::string& url) {
    auto scheme_end = url.find("://");
    std::size_t path_start =
        scheme_end == std::string::npos ? url.find('/') : url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, ""};
    std::string prefix = url.substr(path_start);
    if (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    return {url.substr(0, path_start), prefix};
}

const char* speaker_role(Speaker s) {
    switch (s) {
        case Speaker::System: return "system";
        case Speaker::User: return "user";
        case Speaker::Assistant: return "assistant";
    }
    return "user";
}

}  // namespace

ModelBackend::RawResult HttpBackend::raw_complete(const ModelRequest& request, int /*attempt*/) {
    Json messages = Json::array();
    for (const Message& m : request.messages)
        messages.push_back(Json{{"role", speaker_role(m.speaker)}, {"content", m.text}});
    Json payload{{"model", config_.model_name},
                 {"messages", messages},
                 {"temperature", request.decode.temperature},
                 {"max_tokens", request.decode.max_tokens}};
    if (request.decode.seed) payload["seed"] = *request.decode.seed;

    auto [base, prefix] = split_endpoint(config_.endpoint_url);
    httplib::Client client(base);
    client.set_connection_timeout(config_.timeout_ms / 1000, (config_.timeout_ms % 1000) * 1000);
    client.set_read_timeout(config_.timeout_ms / 1000, (config_.timeout_ms % 1000) * 1000);

    httplib::Headers headers{{"Content-Type", "application/json"}};
    if (!credential_.empty()) headers.emplace("Authorization", "Bearer " + credential_);

    int backoff = config_.retry.backoff_ms;
    for (int attempt = 0; ; ++attempt) {
        auto result = client.Post(prefix + "/chat/completions", headers, payload.dump(),
                                  "application/json");
        if (!result) {
            if (result.error() == httplib::Error::ConnectionTimeout ||
                result.error() == httplib::Error::Read)
                fail(ErrorCode::Timeout, "request to " + config_.endpoint_url + " timed out");
            fail(ErrorCode::Transport,
                 "HTTP error contacting " + config_.endpoint_url + ": " +
                     httplib::to_string(result.error()));
        }
        if (result->status == 429 || result->status >= 500) {
            if (attempt >= config_.retry.max_retries)
                fail(ErrorCode::RateLimited,
                     "giving up after " + std::to_string(attempt + 1) + " attempts (status " +
                         std::to_string(result->status) + ")");
            std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
            backoff *= 2;
            continue;
        }
        if (result->status == 401 || result->status == 403)
            fail(ErrorCode::AuthFailure, "credential rejected (status " +
                                             std::to_string(result->status) + ")");
        if (result->status != 200)
            fail(ErrorCode::Transport, "unexpected status " + std::to_string(result->status));

        Json body = parse_json(result->body, "chat-completions response");
        const Json& choices = require_field(body, "choices", "chat-completions response");
        if (!choices.is_array() || choices.empty())
            fail(ErrorCode::Transport, "chat-completions response has no choices");
        return {require_field(require_field(choices.at(0), "message", "choice"), "content",
                              "choice message")
                    .get<std::string>(),
                attempt + 1};
    }
}

// ---------------------------------------------------------------------------
// BackendSet

ModelBackend& BackendSet::get(RoleTag role) const {
    auto it = per_role_.find(role);
    if (it != per_role_.end() && it->second) return *it->second;
    if (default_) return *default_;
    fail(ErrorCode::ConfigError, "no backend configured for role " + to_string(role));
}

std::vector<std::string> BackendSet::backend_ids() const {
    std::vector<std::string> ids;
    if (default_) ids.push_back(default_->id());
    for (const auto& [role, backend] : per_role_)
        if (backend) ids.push_back(to_string(role) + "=" + backend->id());
    return ids;
}

std::vector<ModelBackend*> BackendSet::distinct_backends() const {
    std::vector<ModelBackend*> out;
    auto add = [&out](ModelBackend* b) {
        if (b && std::find(out.begin(), out.end(), b) == out.end()) out.push_back(b);
    };
    add(default_.get());
    for (const auto& [role, backend] : per_role_) add(backend.get());
    return out;
}

}  // namespace intake::backends
