#include "clusterir/corpus_io.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "clusterir/error.hpp"

namespace clusterir {

namespace {

using nlohmann::json;

std::ifstream open_or_throw(const std::string& path, const char* what) {
    std::ifstream in(path);
    if (!in) throw IoError(std::string(what) + ": cannot open file: " + path);
    return in;
}

std::string at_line(const std::string& path, long line) {
    return path + ":" + std::to_string(line);
}

std::string lowercase_ascii(std::string s) {
    for (char& c : s) {
        unsigned char u = static_cast<unsigned char>(c);
        if (u < 0x80) c = static_cast<char>(std::tolower(u));
    }
    return s;
}

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

} // namespace

std::vector<Document> read_corpus(const std::string& path) {
    std::ifstream in = open_or_throw(path, "corpus");
    std::vector<Document> docs;
    std::unordered_set<std::string> seen;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ParseError("corpus: invalid JSON at " + at_line(path, line_no) + ": " +
                             e.what());
        }
        if (!j.is_object() || !j.contains("id") || !j.contains("text") ||
            !j["id"].is_string() || !j["text"].is_string())
            throw ParseError("corpus: expected {\"id\": string, \"text\": string} at " +
                             at_line(path, line_no));
        Document d;
        d.id = j["id"].get<std::string>();
        d.text = j["text"].get<std::string>();
        if (d.id.empty())
            throw ParseError("corpus: empty document id at " + at_line(path, line_no));
        if (!seen.insert(d.id).second)
            throw ValidationError("corpus: duplicate document id '" + d.id + "' at " +
                                  at_line(path, line_no));
        if (j.contains("tokens")) {
            if (!j["tokens"].is_array())
                throw ParseError("corpus: \"tokens\" must be an array at " +
                                 at_line(path, line_no));
            std::vector<Token> tokens;
            int pos = 0;
            for (const json& tj : j["tokens"]) {
                if (!tj.is_object() || !tj.contains("surface") || !tj["surface"].is_string())
                    throw ParseError("corpus: malformed token object at " +
                                     at_line(path, line_no));
                Token t;
                t.surface = tj["surface"].get<std::string>();
                t.original = tj.value("original", t.surface);
                t.label = label_from_name(tj.value("label", std::string("PLAIN")));
                t.position = pos++;
                if (t.surface.empty())
                    throw ParseError("corpus: empty token surface at " +
                                     at_line(path, line_no));
                tokens.push_back(std::move(t));
            }
            d.tokens = std::move(tokens);
        }
        docs.push_back(std::move(d));
    }
    return docs;
}

std::vector<Query> read_queries(const std::string& path) {
    std::ifstream in = open_or_throw(path, "queries");
    std::vector<Query> queries;
    std::unordered_set<std::string> seen;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0)
            throw ParseError("queries: expected \"id<TAB>text\" at " + at_line(path, line_no));
        Query q;
        q.id = line.substr(0, tab);
        q.text = line.substr(tab + 1);
        if (!seen.insert(q.id).second)
            throw ValidationError("queries: duplicate query id '" + q.id + "' at " +
                                  at_line(path, line_no));
        queries.push_back(std::move(q));
    }
    return queries;
}

Qrels read_qrels(const std::string& path) {
    std::ifstream in = open_or_throw(path, "qrels");
    Qrels qrels;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::istringstream row(line);
        std::string qid, zero, docid, extra;
        long grade = 0;
        if (!(row >> qid >> zero >> docid >> grade) || (row >> extra))
            throw ParseError("qrels: expected \"qid 0 docid grade\" at " +
                             at_line(path, line_no));
        if (grade < 0)
            throw ParseError("qrels: negative grade at " + at_line(path, line_no));
        int& g = qrels.by_query[qid][docid];
        g = std::max(g, static_cast<int>(grade));
    }
    return qrels;
}

SynonymLexicon read_lexicon(const std::string& path) {
    std::ifstream in = open_or_throw(path, "lexicon");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError("lexicon: invalid JSON in " + path + ": " + e.what());
    }
    if (!j.is_object())
        throw ParseError("lexicon: expected a JSON object in " + path);
    SynonymLexicon lex;
    for (const auto& [word, syns] : j.items()) {
        if (!syns.is_array() || syns.empty())
            throw ParseError("lexicon: '" + word + "' must map to a non-empty array in " +
                             path);
        std::vector<std::string> list;
        for (const json& s : syns) {
            if (!s.is_string())
                throw ParseError("lexicon: non-string synonym for '" + word + "' in " + path);
            std::string syn = s.get<std::string>();
            if (syn == word)
                throw ValidationError("lexicon: '" + word + "' maps to itself in " + path);
            list.push_back(std::move(syn));
        }
        lex.pairs[word] = std::move(list);
    }
    return lex;
}

std::unordered_set<std::string> read_word_list(const std::string& path) {
    std::ifstream in = open_or_throw(path, "word list");
    std::unordered_set<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        std::string w = trim(line);
        if (!w.empty()) words.insert(lowercase_ascii(w));
    }
    return words;
}

std::vector<std::pair<std::string, std::string>> read_synonym_pairs(const std::string& path) {
    std::ifstream in = open_or_throw(path, "synonym pairs");
    std::vector<std::pair<std::string, std::string>> pairs;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size())
            throw ParseError("synonym pairs: expected \"word1<TAB>word2\" at " +
                             at_line(path, line_no));
        pairs.emplace_back(trim(line.substr(0, tab)), trim(line.substr(tab + 1)));
    }
    return pairs;
}

void validate_run(const std::vector<RunEntry>& entries) {
    std::map<std::string, const RunEntry*> last_by_query;
    for (const RunEntry& e : entries) {
        if (e.query_id.empty() || e.doc_id.empty())
            throw ValidationError("run: empty query or document id");
        auto [it, fresh] = last_by_query.emplace(e.query_id, nullptr);
        if (fresh) {
            if (e.rank != 1)
                throw ValidationError("run: query '" + e.query_id +
                                      "' does not start at rank 1");
        } else {
            const RunEntry* prev = it->second;
            if (e.rank != prev->rank + 1)
                throw ValidationError("run: rank gap in query '" + e.query_id +
                                      "' (rank " + std::to_string(prev->rank) +
                                      " followed by " + std::to_string(e.rank) + ")");
            if (e.score > prev->score)
                throw ValidationError("run: score inversion in query '" + e.query_id +
                                      "' at rank " + std::to_string(e.rank));
        }
        it->second = &e;
    }
}

void write_run(const std::vector<RunEntry>& entries, const std::string& path) {
    validate_run(entries);
    std::ostringstream out;
    char score[64];
    for (const RunEntry& e : entries) {
        std::snprintf(score, sizeof(score), "%.6f", e.score);
        out << e.query_id << " Q0 " << e.doc_id << ' ' << e.rank << ' ' << score << ' '
            << e.tag << '\n';
    }
    atomic_write(path, out.str());
}

std::vector<RunEntry> read_run(const std::string& path) {
    std::ifstream in = open_or_throw(path, "run");
    std::vector<RunEntry> entries;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::istringstream row(line);
        RunEntry e;
        std::string q0, extra;
        if (!(row >> e.query_id >> q0 >> e.doc_id >> e.rank >> e.score >> e.tag) ||
            (row >> extra))
            throw ParseError("run: expected \"qid Q0 docid rank score tag\" at " +
                             at_line(path, line_no));
        entries.push_back(std::move(e));
    }
    validate_run(entries);
    return entries;
}

void write_queries(const std::vector<Query>& queries, const std::string& path) {
    std::ostringstream out;
    for (const Query& q : queries) out << q.id << '\t' << q.text << '\n';
    atomic_write(path, out.str());
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    fs::path dir = path.parent_path();
    if (dir.empty()) dir = ".";
    fs::path tmp = dir / (path.filename().string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write file: " + tmp.string());
        out << content;
        if (!out) throw IoError("write failed: " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " +
                      ec.message());
    }
}

} // namespace clusterir
