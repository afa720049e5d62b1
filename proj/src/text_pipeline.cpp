#include "clusterir/text_pipeline.hpp"

#include <cctype>
#include <regex>
#include <unordered_map>

#include "clusterir/error.hpp"

namespace clusterir {

namespace {

const std::regex kTagRe("<[^>]*>");
const std::regex kUrlRe(R"((https?://|www\.)\S+)");

bool is_word_byte(unsigned char c) {
    // ASCII alphanumerics plus UTF-8 continuation/lead bytes.
    return std::isalnum(c) || c >= 0x80;
}

std::string collapse_whitespace(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    bool in_space = true; // trims leading whitespace
    for (unsigned char c : s) {
        if (std::isspace(c)) {
            in_space = true;
        } else {
            if (in_space && !out.empty()) out.push_back(' ');
            out.push_back(static_cast<char>(c));
            in_space = false;
        }
    }
    return out;
}

std::string lowercase_ascii(const std::string& s) {
    std::string out = s;
    for (char& c : out) {
        unsigned char u = static_cast<unsigned char>(c);
        if (u < 0x80) c = static_cast<char>(std::tolower(u));
    }
    return out;
}

bool is_capitalized(const std::string& original) {
    return !original.empty() && original[0] >= 'A' && original[0] <= 'Z';
}

} // namespace

std::string preprocess(const std::string& raw) {
    std::string s = std::regex_replace(raw, kTagRe, " ");
    s = std::regex_replace(s, kUrlRe, " ");
    std::string no_hash;
    no_hash.reserve(s.size());
    for (char c : s) {
        if (c != '#') no_hash.push_back(c);
    }
    return collapse_whitespace(no_hash);
}

std::vector<Token> tokenize(const std::string& text,
                            const std::unordered_set<std::string>& stopwords) {
    std::vector<Token> out;
    std::string cur;
    auto flush = [&](std::string word) {
        if (word.empty()) return;
        std::string surface = lowercase_ascii(word);
        if (stopwords.count(surface)) return;
        Token t;
        t.surface = std::move(surface);
        t.original = std::move(word);
        t.position = static_cast<int>(out.size());
        out.push_back(std::move(t));
    };
    for (unsigned char c : text) {
        if (is_word_byte(c)) {
            cur.push_back(static_cast<char>(c));
        } else {
            flush(std::move(cur));
            cur.clear();
        }
    }
    flush(std::move(cur));
    return out;
}

void annotate(std::vector<Token>& tokens,
              const std::unordered_set<std::string>& gazetteer,
              const std::function<int(const std::string&)>& doc_freq,
              int rw_threshold) {
    for (Token& t : tokens) {
        bool ne = (t.position > 0 && is_capitalized(t.original)) ||
                  gazetteer.count(t.surface) > 0;
        if (ne) {
            t.label = Label::NamedEntity;
        } else if (doc_freq(t.surface) <= rw_threshold) {
            t.label = Label::RareWord;
        } else {
            t.label = Label::Plain;
        }
    }
}

void annotate(std::vector<Token>& tokens,
              const std::unordered_set<std::string>& gazetteer,
              const Vocabulary& vocabulary, int rw_threshold) {
    annotate(
        tokens, gazetteer,
        [&vocabulary](const std::string& s) { return vocabulary.doc_freq(s); },
        rw_threshold);
}

std::vector<Token> document_tokens(const Document& doc, const PipelineConfig& cfg) {
    if (doc.tokens.has_value()) {
        std::vector<Token> out = *doc.tokens;
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i].surface = lowercase_ascii(out[i].surface);
            out[i].position = static_cast<int>(i);
        }
        return out;
    }
    return tokenize(preprocess(doc.text), cfg.stopwords);
}

Vocabulary build_vocabulary(const std::vector<Document>& corpus, const PipelineConfig& cfg) {
    Vocabulary vocab;
    std::unordered_map<std::string, bool> ne_seen;
    for (const Document& doc : corpus) {
        std::vector<Token> tokens = document_tokens(doc, cfg);
        std::unordered_map<std::string, int> local;
        for (const Token& t : tokens) {
            ++local[t.surface];
            bool explicit_ne = doc.tokens.has_value() && t.label == Label::NamedEntity;
            bool heuristic_ne = !doc.tokens.has_value() &&
                                ((t.position > 0 && is_capitalized(t.original)) ||
                                 cfg.gazetteer.count(t.surface) > 0);
            if (explicit_ne || heuristic_ne) ne_seen[t.surface] = true;
        }
        for (const auto& [surface, tf] : local) {
            VocabEntry& e = vocab.entries[surface];
            e.term_freq += tf;
            e.doc_freq += 1;
        }
    }
    for (auto& [surface, e] : vocab.entries) {
        if (ne_seen.count(surface)) {
            e.label = Label::NamedEntity;
        } else if (e.doc_freq <= cfg.rw_threshold) {
            e.label = Label::RareWord;
        } else {
            e.label = Label::Plain;
        }
    }
    return vocab;
}

} // namespace clusterir
