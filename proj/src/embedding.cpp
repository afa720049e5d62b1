#include "clusterir/embedding.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "clusterir/error.hpp"

namespace clusterir {

namespace {

std::string at_line(const std::string& path, long line) {
    return path + ":" + std::to_string(line);
}

} // namespace

EmbeddingTable load_embeddings(const std::string& path,
                               const std::unordered_set<std::string>* vocab_filter) {
    std::ifstream in(path);
    if (!in) throw IoError("embeddings: cannot open file: " + path);

    std::string line;
    if (!std::getline(in, line))
        throw ParseError("embeddings: empty file: " + path);

    long count = 0;
    int dim = 0;
    {
        std::istringstream header(line);
        std::string extra;
        if (!(header >> count >> dim) || (header >> extra) || count < 0 || dim <= 0)
            throw ParseError("embeddings: malformed header (expected \"count dim\") at " +
                             at_line(path, 1));
    }

    EmbeddingTable table;
    table.dim = dim;
    long rows = 0;
    long line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        ++rows;
        std::istringstream row(line);
        std::string word;
        if (!(row >> word))
            throw ParseError("embeddings: malformed row at " + at_line(path, line_no));
        Vec v(dim);
        for (int i = 0; i < dim; ++i) {
            if (!(row >> v[i]))
                throw ParseError("embeddings: expected " + std::to_string(dim) +
                                 " values for word '" + word + "' at " +
                                 at_line(path, line_no));
            if (!std::isfinite(v[i]))
                throw ParseError("embeddings: non-finite component for word '" + word +
                                 "' at " + at_line(path, line_no));
        }
        std::string extra;
        if (row >> extra)
            throw ParseError("embeddings: expected " + std::to_string(dim) +
                             " values for word '" + word + "' at " + at_line(path, line_no));
        bool zero = true;
        for (double x : v) {
            if (x != 0.0) {
                zero = false;
                break;
            }
        }
        if (zero)
            throw ParseError("embeddings: zero vector rejected for word '" + word +
                             "' at " + at_line(path, line_no));
        if (vocab_filter && vocab_filter->count(word) == 0) continue;
        if (!table.entries.emplace(word, std::move(v)).second)
            throw ParseError("embeddings: duplicate word '" + word + "' at " +
                             at_line(path, line_no));
    }
    if (rows != count)
        throw ParseError("embeddings: header declares " + std::to_string(count) +
                         " rows but file contains " + std::to_string(rows) + ": " + path);
    return table;
}

} // namespace clusterir
