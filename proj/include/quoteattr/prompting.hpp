#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "quoteattr/corpus.hpp"

namespace quoteattr {

struct CSGItem;  // memaudit.hpp

enum class PromptFamily { Attribution, IncrementalAttribution, CsgCloze, CsgSpeaker, NameCloze };

// The five prompt templates. Slots use {{name}} syntax; rendering is a
// pure byte-stable substitution.
struct PromptTemplateSet {
    std::string attribution;
    std::string incremental;
    std::string csg_cloze;
    std::string csg_speaker;
    std::string name_cloze;

    static const PromptTemplateSet& defaults();
    // Overrides defaults with any of attribution.txt, incremental.txt,
    // csg_cloze.txt, csg_speaker.txt, name_cloze.txt found in dir.
    static PromptTemplateSet from_dir(const std::filesystem::path& dir);
    void dump_dir(const std::filesystem::path& dir) const;
};

// Replaces {{slot}} placeholders; throws on unknown or unresolved slots.
std::string render_template(std::string_view tmpl,
                            const std::map<std::string, std::string>& slots);

// One line per character, Canonical=Alias1=..., sorted by canonical id,
// wrapped in --- fences.
std::string format_alias_block(const AliasMap& map);

std::string build_attribution_prompt(std::string_view marked_text, std::string_view alias_block,
                                     const PromptTemplateSet& templates = PromptTemplateSet::defaults());

std::string build_incremental_prompt(std::string_view marked_text, std::string_view alias_block,
                                     const std::map<int, std::string>& previous,
                                     const PromptTemplateSet& templates = PromptTemplateSet::defaults());

std::string build_csg_prompt(const CSGItem& item,
                             const PromptTemplateSet& templates = PromptTemplateSet::defaults());

std::string build_name_cloze_prompt(std::string_view passage_with_single_mask,
                                    const PromptTemplateSet& templates = PromptTemplateSet::defaults());

// { '2': 'pred_0', '4': 'pred_1' } rendering of a carryover map.
std::string format_previous_predictions(const std::map<int, std::string>& previous);

}  // namespace quoteattr
