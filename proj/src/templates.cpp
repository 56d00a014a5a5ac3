#include "quoteattr/prompting.hpp"

namespace quoteattr {

// Template texts are part of the method contract: golden tests pin every
// byte, and ablations go through override files, never through edits here.

namespace {

const char kAttribution[] =
    R"(Instruction: You are an excellent linguist working in the field of literature. I will provide you with a passage of a book where some quotes have unique identifiers marked by headers '|quote_id|'. Your are tasked to build a list of quote attributions by sequentially attributing the marked quotes to their speaker.

Passage:

---

{{passage}}

---

Step 1: Attribute sequentially each quote to their speaker.

Step 2: Match each speaker found in the previous step with one of the following name:

Names

{{alias_block}}

Step 3: Replace the speakers found in Step 1 with their matching name found in Step 2. Your answer should follow this JSON format:

{

'quote_id_1' : 'predicted_speaker_1',

'quote_id_2' : 'predicted_speaker_2'

}

Your answer should only contain the output of Step 3 and can only contain quote identifiers and speakers. Never generate quote content and don't explain your reasoning.)";

const char kIncremental[] =
    R"(Instruction: You are an excellent linguist working in the field of literature. I will provide you with a passage of a book where some quotes have unique identifiers marked by headers '|quote_id|'. You will also be provided a list of characters and their aliases, and previous predictions. Your are tasked to build a list of quote attributions by sequentially attributing the marked quotes to their speaker.

Passage:

---

{{passage}}

---

Previous predictions:

---

{{previous_predictions}}

---

Step 1: Attribute sequentially each quote to their speaker. Update the previous predictions if you think it contains wrong speaker prediction.

Step 2: Match each speaker found in the previous step with one of the following name:

Names

{{alias_block}}

Step 3: Replace the speakers found in Step 1 with their matching name found in Step 2. Your answer should follow this JSON format:

{

'quote_id_1' : 'predicted_speaker_1',

'quote_id_2' : 'predicted_speaker_2'

}

Your answer should only contain the output of Step 3 and can only contain quote identifiers and speakers. Never generate quote content and don't explain your reasoning.)";

const char kCsgCloze[] =
    R"(You will be given a passage of the book {{book_title}} written by {{author}} that you have seen in your training data. Find the proper name that fills the [MASK] token. This name is a proper name (not a pronoun or any other word). You must make a guess, even if you are uncertain. Do not explain your reasoning.

You must format your answer in <speaker>[SPEAKER]<\speaker> tags.

Passage:

{{passage}}

Target quote:

{{target_quote}})";

const char kCsgSpeaker[] =
    R"(You will be given a passage of the book {{book_title}} written by {{author}} that you have seen in your training data. Find the true speaker name of the target quote. This name is a proper name (not a pronoun or any other word). You must make a guess, even if you are uncertain. Do not explain your reasoning.

You must format your answer in <speaker>[SPEAKER]<\speaker> tags.

Passage:

{{passage}}

Target quote:

{{target_quote}})";

const char kNameCloze[] =
    R"(You will be given a passage of text. Find the proper name that fills the [MASK] token. This name is a proper name (not a pronoun or any other word). You must make a guess, even if you are uncertain. Do not explain your reasoning.

You must format your answer in <speaker>[SPEAKER]<\speaker> tags.

Passage:

{{passage}})";

}  // namespace

const PromptTemplateSet& PromptTemplateSet::defaults() {
    static const PromptTemplateSet set{kAttribution, kIncremental, kCsgCloze, kCsgSpeaker,
                                       kNameCloze};
    return set;
}

}  // namespace quoteattr
