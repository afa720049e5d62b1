#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "clusterir/embedding.hpp"
#include "clusterir/index.hpp"
#include "clusterir/types.hpp"

namespace fixtures {

using clusterir::Document;
using clusterir::EmbeddingTable;
using clusterir::IndexConfig;
using clusterir::Qrels;
using clusterir::Query;
using clusterir::SynonymLexicon;
using clusterir::Vec;

// Self-cleaning scratch directory for file-based tests.
struct TempDir {
    std::filesystem::path path;

    TempDir() {
        auto base = std::filesystem::temp_directory_path();
        std::random_device rd;
        for (int attempt = 0; attempt < 64; ++attempt) {
            auto candidate = base / ("clusterir-test-" + std::to_string(rd()));
            std::error_code ec;
            if (std::filesystem::create_directory(candidate, ec)) {
                path = candidate;
                return;
            }
        }
        throw std::runtime_error("could not create temp directory");
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::filesystem::path file(const std::string& name) const { return path / name; }
};

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
}

inline Vec random_unit_vec(std::mt19937& rng, int dim) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vec v(dim);
    double sq = 0.0;
    do {
        sq = 0.0;
        for (double& x : v) {
            x = gauss(rng);
            sq += x * x;
        }
    } while (sq == 0.0);
    double inv = 1.0 / std::sqrt(sq);
    for (double& x : v) x *= inv;
    return v;
}

// A unit vector near base: cosine distance grows with noise (roughly
// noise^2 / 2 for small noise).
inline Vec perturbed_unit_vec(std::mt19937& rng, const Vec& base, double noise) {
    Vec v = random_unit_vec(rng, static_cast<int>(base.size()));
    double sq = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = base[i] + noise * v[i];
        sq += v[i] * v[i];
    }
    double inv = 1.0 / std::sqrt(sq);
    for (double& x : v) x *= inv;
    return v;
}

inline std::string zero_pad(int n, int width) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%0*d", width, n);
    return buf;
}

// Random retrieval fixture: a grouped vocabulary (synonym-like groups plus
// isolated words), documents sampling it, and queries mixing in-corpus words
// with out-of-vocabulary ones.
struct RandomScenario {
    EmbeddingTable table;
    std::vector<std::string> corpus_words; // samplable vocabulary
    std::vector<std::string> oov_words;    // embedded but never in the corpus
    std::vector<Document> corpus;
    std::vector<Query> queries;
    IndexConfig config;
};

inline RandomScenario make_random_scenario(unsigned seed, int n_docs, int n_queries) {
    std::mt19937 rng(seed);
    RandomScenario s;
    const int dim = 32;
    s.table.dim = dim;
    s.config.epsilon = 0.25;
    s.config.pipeline.stopwords = {"the", "of"};

    // 50 tight groups of 3 plus 100 isolated words.
    for (int g = 0; g < 50; ++g) {
        Vec base = random_unit_vec(rng, dim);
        for (int m = 0; m < 3; ++m) {
            std::string word = "g" + zero_pad(g, 3) + static_cast<char>('a' + m);
            s.table.entries[word] = perturbed_unit_vec(rng, base, 0.25);
            s.corpus_words.push_back(word);
        }
    }
    for (int i = 0; i < 100; ++i) {
        std::string word = "solo" + zero_pad(i, 3);
        s.table.entries[word] = random_unit_vec(rng, dim);
        s.corpus_words.push_back(word);
    }
    // Entities appear capitalized mid-sentence; a few corpus words have no
    // embedding at all.
    std::vector<std::string> entities;
    for (int i = 0; i < 10; ++i) entities.push_back("Entity" + zero_pad(i, 2));
    std::vector<std::string> unembedded;
    for (int i = 0; i < 5; ++i) unembedded.push_back("ghost" + zero_pad(i, 2));
    // Embedded words that never occur in any document.
    for (int i = 0; i < 20; ++i) {
        std::string word = "oov" + zero_pad(i, 2);
        s.table.entries[word] = random_unit_vec(rng, dim);
        s.oov_words.push_back(word);
    }

    std::uniform_int_distribution<int> doc_len(8, 25);
    std::uniform_int_distribution<std::size_t> pick_word(0, s.corpus_words.size() - 1);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    for (int d = 0; d < n_docs; ++d) {
        std::string text = "the";
        int len = doc_len(rng);
        for (int i = 0; i < len; ++i) {
            text += ' ';
            double u = coin(rng);
            if (u < 0.03) {
                text += entities[static_cast<std::size_t>(coin(rng) * entities.size())];
            } else if (u < 0.05) {
                text += unembedded[static_cast<std::size_t>(coin(rng) * unembedded.size())];
            } else {
                text += s.corpus_words[pick_word(rng)];
            }
        }
        s.corpus.push_back({"d" + zero_pad(d, 3), text, std::nullopt});
    }

    std::uniform_int_distribution<int> query_len(2, 6);
    std::uniform_int_distribution<std::size_t> pick_oov(0, s.oov_words.size() - 1);
    for (int q = 0; q < n_queries; ++q) {
        std::string text;
        int len = query_len(rng);
        for (int i = 0; i < len; ++i) {
            if (i) text += ' ';
            double u = coin(rng);
            if (u < 0.15) {
                text += s.oov_words[pick_oov(rng)];
            } else if (u < 0.20) {
                text += "neverseen" + zero_pad(q, 2);
            } else {
                text += s.corpus_words[pick_word(rng)];
            }
        }
        s.queries.push_back({"q" + zero_pad(q, 3), text});
    }
    return s;
}

// Synonym-substitution fixture: every document owns three private word groups
// plus shared filler words; each word has a never-in-corpus synonym variant
// whose vector sits just off the original's. Queries quote the document's own
// words, so rewriting them with the lexicon leaves bm25 only the filler
// signal while the cluster space still matches.
struct SynonymScenario {
    EmbeddingTable table;
    std::vector<Document> corpus;
    std::vector<Query> queries;
    SynonymLexicon lexicon;
    Qrels qrels;
    IndexConfig config;
};

inline SynonymScenario make_synonym_scenario() {
    SynonymScenario s;
    const int n_docs = 50;
    const int n_groups = 3 * n_docs;
    const int n_fillers = 5;
    const int dim = n_groups + n_fillers;
    s.table.dim = dim;
    s.config.epsilon = 0.1;
    s.config.pipeline.rw_threshold = 0;

    auto one_hot = [&](int axis) {
        Vec v(dim, 0.0);
        v[axis] = 1.0;
        return v;
    };
    auto group_word = [&](int g, char variant) {
        return "g" + zero_pad(g, 3) + variant;
    };
    for (int g = 0; g < n_groups; ++g) {
        Vec base = one_hot(g);
        s.table.entries[group_word(g, 'a')] = base;
        Vec off = base;
        off[(g + 1) % n_groups] = 0.1;
        double inv = 1.0 / std::sqrt(1.0 + 0.01);
        for (double& x : off) x *= inv;
        s.table.entries[group_word(g, 'b')] = off;
        s.lexicon.pairs[group_word(g, 'a')] = {group_word(g, 'b')};
    }
    std::vector<std::string> fillers;
    for (int i = 0; i < n_fillers; ++i) {
        fillers.push_back("common" + std::to_string(i));
        s.table.entries[fillers.back()] = one_hot(n_groups + i);
    }

    for (int d = 0; d < n_docs; ++d) {
        std::string text;
        for (int m = 0; m < 3; ++m) {
            std::string w = group_word(3 * d + m, 'a');
            for (int rep = 0; rep < 3; ++rep) {
                if (!text.empty()) text += ' ';
                text += w;
            }
        }
        for (const std::string& f : fillers) text += ' ' + f;
        std::string doc_id = "d" + zero_pad(d, 2);
        s.corpus.push_back({doc_id, text, std::nullopt});

        std::string query = group_word(3 * d, 'a') + ' ' + group_word(3 * d + 1, 'a') +
                            ' ' + group_word(3 * d + 2, 'a') + ' ' + fillers[0];
        std::string query_id = "q" + zero_pad(d, 2);
        s.queries.push_back({query_id, query});
        s.qrels.by_query[query_id][doc_id] = 1;
    }
    return s;
}

} // namespace fixtures
