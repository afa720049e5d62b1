#pragma once

#include <functional>
#include <map>
#include <string>
#include <unordered_set>
#include <vector>

#include "clusterir/types.hpp"

namespace clusterir {

struct PipelineConfig {
    std::unordered_set<std::string> stopwords;
    std::unordered_set<std::string> gazetteer;
    // A surface with document frequency <= rw_threshold is a rare word.
    int rw_threshold = 1;
};

struct VocabEntry {
    long term_freq = 0;
    int doc_freq = 0;
    Label label = Label::Plain;
};

struct Vocabulary {
    std::map<std::string, VocabEntry> entries;

    int doc_freq(const std::string& surface) const {
        auto it = entries.find(surface);
        return it == entries.end() ? 0 : it->second.doc_freq;
    }
};

// Strips HTML tag spans, URLs and hashtag markers, then collapses whitespace.
// Idempotent; may return an empty string.
std::string preprocess(const std::string& raw);

// Splits on non-alphanumeric boundaries (UTF-8 multibyte sequences count as
// word characters), lowercases ASCII into surface, drops stopwords, and
// assigns consecutive positions starting at 0.
std::vector<Token> tokenize(const std::string& text,
                            const std::unordered_set<std::string>& stopwords);

// Labels each token: NE when its original form is capitalized at a non-initial
// position or its surface is in the gazetteer; RW when doc_freq(surface) <=
// rw_threshold and not NE; PLAIN otherwise.
void annotate(std::vector<Token>& tokens,
              const std::unordered_set<std::string>& gazetteer,
              const std::function<int(const std::string&)>& doc_freq,
              int rw_threshold);

void annotate(std::vector<Token>& tokens,
              const std::unordered_set<std::string>& gazetteer,
              const Vocabulary& vocabulary, int rw_threshold);

// Preprocesses and tokenizes one document, honoring pre-annotated tokens when
// the document carries them.
std::vector<Token> document_tokens(const Document& doc, const PipelineConfig& cfg);

// One entry per distinct surface with exact corpus term/document frequencies.
// A surface is NE when any of its occurrences is NE (heuristic for raw text,
// explicit label for pre-annotated documents); RW by document frequency.
Vocabulary build_vocabulary(const std::vector<Document>& corpus, const PipelineConfig& cfg);

} // namespace clusterir
