#include "clusterir/types.hpp"

#include "clusterir/error.hpp"

namespace clusterir {

const char* label_name(Label l) {
    switch (l) {
        case Label::NamedEntity: return "NE";
        case Label::RareWord: return "RW";
        default: return "PLAIN";
    }
}

Label label_from_name(const std::string& name) {
    if (name == "NE") return Label::NamedEntity;
    if (name == "RW") return Label::RareWord;
    if (name == "PLAIN") return Label::Plain;
    throw ParseError("unknown token label: " + name);
}

int Qrels::grade(const std::string& query_id, const std::string& doc_id) const {
    auto q = by_query.find(query_id);
    if (q == by_query.end()) return 0;
    auto d = q->second.find(doc_id);
    return d == q->second.end() ? 0 : d->second;
}

bool Qrels::is_relevant(const std::string& query_id, const std::string& doc_id) const {
    return grade(query_id, doc_id) >= 1;
}

int Qrels::relevant_count(const std::string& query_id) const {
    auto q = by_query.find(query_id);
    if (q == by_query.end()) return 0;
    int n = 0;
    for (const auto& [doc, g] : q->second) {
        if (g >= 1) ++n;
    }
    return n;
}

} // namespace clusterir
