#pragma once

#include <string>
#include <unordered_map>
#include <unordered_set>

#include "clusterir/types.hpp"

namespace clusterir {

struct EmbeddingTable {
    int dim = 0;
    std::unordered_map<std::string, Vec> entries;

    // Returns nullptr when the word has no vector.
    const Vec* find(const std::string& word) const {
        auto it = entries.find(word);
        return it == entries.end() ? nullptr : &it->second;
    }

    bool contains(const std::string& word) const { return entries.count(word) > 0; }
    std::size_t size() const { return entries.size(); }
};

// Loads a text word-vector file: header "count dim", then one "word v1 .. vdim"
// row per line. When vocab_filter is given, only words in the filter are kept;
// every row is still parsed and validated (row count, dimension, finiteness,
// non-zero vector).
EmbeddingTable load_embeddings(const std::string& path,
                               const std::unordered_set<std::string>* vocab_filter = nullptr);

} // namespace clusterir
