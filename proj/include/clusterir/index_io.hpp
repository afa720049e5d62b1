#pragma once

#include <filesystem>

#include "clusterir/index.hpp"

namespace clusterir {

// Persists the index into a directory: manifest.json, clusters.jsonl,
// docs.jsonl, stats.json, stopwords.txt, gazetteer.txt. All floating point
// values round-trip exactly.
void save_index(const Index& index, const std::filesystem::path& dir);

// Loads an index saved by save_index. Throws IncompatibleIndexError on a
// format version mismatch and CorruptIndexError on missing files.
Index load_index(const std::filesystem::path& dir);

} // namespace clusterir
