#pragma once
// Plain-text prompt templates with {name} placeholders, loaded from a
// directory so operators can edit them without rebuilding.

#include <map>
#include <string>

namespace intake::prompts {

// Replace every "{key}" occurrence for the provided keys. Unknown braces are
// left untouched, so JSON examples inside templates survive rendering.
std::string render(const std::string& template_text,
                   const std::map<std::string, std::string>& values);

class PromptLibrary {
public:
    // Loads <dir>/<name>.txt lazily and caches it.
    explicit PromptLibrary(std::string dir) : dir_(std::move(dir)) {}

    const std::string& get(const std::string& name) const;
    std::string render(const std::string& name,
                       const std::map<std::string, std::string>& values) const;

private:
    std::string dir_;
    mutable std::map<std::string, std::string> cache_;
};

}  // namespace intake::prompts
