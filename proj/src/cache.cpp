#include "quoteattr/cache.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "quoteattr/errors.hpp"

namespace quoteattr {

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr))
        throw Error("sha256 digest failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xF]);
    }
    return out;
}

namespace {

std::string params_fingerprint(const DecodingParams& params) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g|%d|%lld", params.temperature,
                  params.max_output_tokens,
                  params.seed ? static_cast<long long>(*params.seed) : -1ll);
    return buf;
}

std::string cache_key(std::string_view model, std::string_view kind, std::string_view payload,
                      const std::string& params) {
    std::string material;
    material.reserve(model.size() + kind.size() + payload.size() + params.size() + 4);
    material.append(model);
    material.push_back('\x1f');
    material.append(kind);
    material.push_back('\x1f');
    material.append(params);
    material.push_back('\x1f');
    material.append(payload);
    return sha256_hex(material);
}

std::optional<nlohmann::json> read_json(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buf;
    buf << in.rdbuf();
    auto parsed = nlohmann::json::parse(buf.str(), nullptr, false);
    if (parsed.is_discarded()) return std::nullopt;  // corrupt entry: treat as miss
    return parsed;
}

}  // namespace

ResponseCache::ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
}

std::filesystem::path ResponseCache::path_for(std::string_view key) const {
    return dir_ / key.substr(0, 2) / (std::string(key.substr(2)) + ".json");
}

std::optional<std::string> ResponseCache::get_completion(std::string_view model,
                                                         std::string_view prompt,
                                                         const DecodingParams& params) const {
    auto key = cache_key(model, "complete", prompt, params_fingerprint(params));
    auto entry = read_json(path_for(key));
    if (!entry || !entry->contains("response")) return std::nullopt;
    return (*entry)["response"].get<std::string>();
}

void ResponseCache::put_completion(std::string_view model, std::string_view prompt,
                                   const DecodingParams& params, std::string_view response) {
    auto key = cache_key(model, "complete", prompt, params_fingerprint(params));
    nlohmann::json entry = {{"kind", "complete"},
                            {"model", std::string(model)},
                            {"params", params_fingerprint(params)},
                            {"prompt", std::string(prompt)},
                            {"response", std::string(response)}};
    std::lock_guard<std::mutex> lock(write_mutex_);
    auto path = path_for(key);
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << entry.dump(2);
}

std::optional<std::vector<TokenScore>> ResponseCache::get_scores(std::string_view model,
                                                                 std::string_view text) const {
    auto key = cache_key(model, "score", text, "");
    auto entry = read_json(path_for(key));
    if (!entry || !entry->contains("scores")) return std::nullopt;
    std::vector<TokenScore> scores;
    for (const auto& item : (*entry)["scores"])
        scores.push_back({item[0].get<std::string>(), item[1].get<double>()});
    return scores;
}

void ResponseCache::put_scores(std::string_view model, std::string_view text,
                               const std::vector<TokenScore>& scores) {
    auto key = cache_key(model, "score", text, "");
    nlohmann::json list = nlohmann::json::array();
    for (const auto& s : scores) list.push_back({s.token, s.logprob});
    nlohmann::json entry = {{"kind", "score"},
                            {"model", std::string(model)},
                            {"text", std::string(text)},
                            {"scores", std::move(list)}};
    std::lock_guard<std::mutex> lock(write_mutex_);
    auto path = path_for(key);
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << entry.dump(2);
}

std::string CachingBackend::complete(std::string_view prompt, const DecodingParams& params) {
    if (auto hit = cache_.get_completion(inner_.model_id(), prompt, params)) return *hit;
    std::string response = inner_.complete(prompt, params);
    cache_.put_completion(inner_.model_id(), prompt, params, response);
    return response;
}

std::vector<TokenScore> CachingBackend::score(std::string_view text) {
    if (auto hit = cache_.get_scores(inner_.model_id(), text)) return *hit;
    auto scores = inner_.score(text);
    cache_.put_scores(inner_.model_id(), text, scores);
    return scores;
}

}  // namespace quoteattr
