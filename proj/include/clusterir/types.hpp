#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace clusterir {

using Vec = std::vector<double>;

enum class Label { Plain, NamedEntity, RareWord };

const char* label_name(Label l);
Label label_from_name(const std::string& name);

struct Token {
    std::string surface;  // lowercased form used for matching
    std::string original; // form as it appeared in the text
    Label label = Label::Plain;
    int position = 0; // 0-based, consecutive after stopword filtering
};

struct Document {
    std::string id;
    std::string text;
    // Pre-annotated variant: when present these tokens are used verbatim and
    // the heuristic annotator is bypassed for this document.
    std::optional<std::vector<Token>> tokens;
};

struct Query {
    std::string id;
    std::string text;
};

struct Qrels {
    // query id -> (doc id -> relevance grade). Relevant means grade >= 1.
    std::map<std::string, std::map<std::string, int>> by_query;

    int grade(const std::string& query_id, const std::string& doc_id) const;
    bool is_relevant(const std::string& query_id, const std::string& doc_id) const;
    int relevant_count(const std::string& query_id) const;
};

struct RunEntry {
    std::string query_id;
    std::string doc_id;
    int rank = 0; // 1-based
    double score = 0.0;
    std::string tag;
};

struct SynonymLexicon {
    std::map<std::string, std::vector<std::string>> pairs;
};

} // namespace clusterir
