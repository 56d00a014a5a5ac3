#include "quoteattr/prompting.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "quoteattr/errors.hpp"
#include "quoteattr/memaudit.hpp"
#include "quoteattr/strings.hpp"

namespace quoteattr {

namespace {

std::string read_file_or(const std::filesystem::path& path, const std::string& fallback) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return fallback;
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

bool has_marker(std::string_view text) {
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] != '|') continue;
        std::size_t j = i + 1;
        while (j < text.size() && str::is_ascii_digit(text[j])) ++j;
        if (j > i + 1 && j < text.size() && text[j] == '|') return true;
    }
    return false;
}

}  // namespace

PromptTemplateSet PromptTemplateSet::from_dir(const std::filesystem::path& dir) {
    const PromptTemplateSet& base = defaults();
    PromptTemplateSet set;
    set.attribution = read_file_or(dir / "attribution.txt", base.attribution);
    set.incremental = read_file_or(dir / "incremental.txt", base.incremental);
    set.csg_cloze = read_file_or(dir / "csg_cloze.txt", base.csg_cloze);
    set.csg_speaker = read_file_or(dir / "csg_speaker.txt", base.csg_speaker);
    set.name_cloze = read_file_or(dir / "name_cloze.txt", base.name_cloze);
    return set;
}

void PromptTemplateSet::dump_dir(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    write_file(dir / "attribution.txt", attribution);
    write_file(dir / "incremental.txt", incremental);
    write_file(dir / "csg_cloze.txt", csg_cloze);
    write_file(dir / "csg_speaker.txt", csg_speaker);
    write_file(dir / "name_cloze.txt", name_cloze);
}

std::string render_template(std::string_view tmpl,
                            const std::map<std::string, std::string>& slots) {
    std::string out;
    out.reserve(tmpl.size());
    std::size_t pos = 0;
    while (true) {
        std::size_t open = tmpl.find("{{", pos);
        if (open == std::string_view::npos) break;
        std::size_t close = tmpl.find("}}", open + 2);
        if (close == std::string_view::npos)
            throw Error("template has an unterminated {{slot}}");
        out.append(tmpl.substr(pos, open - pos));
        std::string name(tmpl.substr(open + 2, close - open - 2));
        auto it = slots.find(name);
        if (it == slots.end()) throw Error("template slot '" + name + "' not provided");
        out.append(it->second);
        pos = close + 2;
    }
    out.append(tmpl.substr(pos));
    if (out.find("{{") != std::string::npos)
        throw Error("rendered prompt still contains a {{slot}}");
    return out;
}

std::string format_alias_block(const AliasMap& map) {
    if (map.empty()) throw Error("alias block requires a non-empty character map");
    std::vector<const Character*> chars;
    chars.reserve(map.characters().size());
    for (const auto& c : map.characters()) chars.push_back(&c);
    std::sort(chars.begin(), chars.end(),
              [](const Character* a, const Character* b) { return a->id < b->id; });

    std::string out = "---\n";
    for (const Character* c : chars) {
        out += str::join(c->aliases, "=");
        out += '\n';
    }
    out += "---";
    return out;
}

std::string build_attribution_prompt(std::string_view marked_text, std::string_view alias_block,
                                     const PromptTemplateSet& templates) {
    if (!has_marker(marked_text))
        throw Error("attribution prompt requires at least one |id| marker");
    return render_template(templates.attribution, {{"passage", std::string(marked_text)},
                                                   {"alias_block", std::string(alias_block)}});
}

std::string format_previous_predictions(const std::map<int, std::string>& previous) {
    std::string out = "{ ";
    bool first = true;
    for (const auto& [local, name] : previous) {
        if (!first) out += ", ";
        first = false;
        out += "'" + std::to_string(local) + "': '" + name + "'";
    }
    out += " }";
    return out;
}

std::string build_incremental_prompt(std::string_view marked_text, std::string_view alias_block,
                                     const std::map<int, std::string>& previous,
                                     const PromptTemplateSet& templates) {
    if (previous.empty())
        throw Error("incremental prompt requires previous predictions; use the plain prompt");
    if (!has_marker(marked_text))
        throw Error("attribution prompt requires at least one |id| marker");
    return render_template(templates.incremental,
                           {{"passage", std::string(marked_text)},
                            {"alias_block", std::string(alias_block)},
                            {"previous_predictions", format_previous_predictions(previous)}});
}

std::string build_csg_prompt(const CSGItem& item, const PromptTemplateSet& templates) {
    const bool cloze = item.variant == CsgVariant::Cloze;
    if (cloze) {
        std::size_t first = item.corrupted_passage.find("[MASK]");
        if (first == std::string::npos)
            throw Error("cloze item has no [MASK] in its corrupted passage");
    }
    const std::string& tmpl = cloze ? templates.csg_cloze : templates.csg_speaker;
    return render_template(tmpl, {{"book_title", item.book_title},
                                  {"author", item.book_author},
                                  {"passage", item.corrupted_passage},
                                  {"target_quote", item.target_quote}});
}

std::string build_name_cloze_prompt(std::string_view passage_with_single_mask,
                                    const PromptTemplateSet& templates) {
    std::size_t count = 0;
    std::size_t pos = 0;
    while ((pos = passage_with_single_mask.find("[MASK]", pos)) != std::string_view::npos) {
        ++count;
        pos += 6;
    }
    if (count != 1)
        throw Error("name-cloze passage must contain exactly one [MASK], found " +
                    std::to_string(count));
    return render_template(templates.name_cloze,
                           {{"passage", std::string(passage_with_single_mask)}});
}

}  // namespace quoteattr
