#pragma once

#include <filesystem>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "clusterir/types.hpp"

namespace clusterir {

// JSON Lines, one object {"id": ..., "text": ...} per line; an optional
// "tokens" array of {"surface","original","label"} objects carries
// pre-annotated labels.
std::vector<Document> read_corpus(const std::string& path);

// TSV "id<TAB>text".
std::vector<Query> read_queries(const std::string& path);

// TREC 4-column "qid 0 docid grade"; duplicate (qid, docid) pairs keep the
// maximum grade.
Qrels read_qrels(const std::string& path);

// JSON object word -> array of synonyms.
SynonymLexicon read_lexicon(const std::string& path);

// One word per line, lowercased; used for stopword and gazetteer files.
std::unordered_set<std::string> read_word_list(const std::string& path);

// One pair per line, "word1<TAB>word2".
std::vector<std::pair<std::string, std::string>> read_synonym_pairs(const std::string& path);

// Checks RunEntry invariants: per query, ranks 1..k without gaps and
// non-increasing scores.
void validate_run(const std::vector<RunEntry>& entries);

// TREC 6-column "qid Q0 docid rank score tag", scores at 6 decimal places.
// Validates before writing; the write is atomic (temp file + rename).
void write_run(const std::vector<RunEntry>& entries, const std::string& path);

std::vector<RunEntry> read_run(const std::string& path);

void write_queries(const std::vector<Query>& queries, const std::string& path);

// Writes content to path via a temp file in the same directory plus rename.
void atomic_write(const std::filesystem::path& path, const std::string& content);

} // namespace clusterir
