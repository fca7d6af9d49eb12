#include "intake/prompts.hpp"

#include "intake/json_util.hpp"

namespace intake::prompts {

std::string render(const std::string& template_text,
                   const std::map<std::string, std::string>& values) {
    std::string out = template_text;
    for (const auto& [key, value] : values) {
        const std::string needle = "{" + key + "}";
        std::size_t pos = 0;
        while ((pos = out.find(needle, pos)) != std::string::npos) {
            out.replace(pos, needle.size(), value);
            pos += value.size();
        }
    }
    return out;
}

const std::string& PromptLibrary::get(const std::string& name) const {
    auto it = cache_.find(name);
    if (it == cache_.end())
        it = cache_.emplace(name, read_text_file(dir_ + "/" + name + ".txt")).first;
    return it->second;
}

std::string PromptLibrary::render(const std::string& name,
                                  const std::map<std::string, std::string>& values) const {
    return prompts::render(get(name), values);
}

}  // namespace intake::prompts
