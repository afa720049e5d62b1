#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "clusterir/embedding.hpp"
#include "clusterir/index.hpp"
#include "clusterir/types.hpp"

namespace clusterir {

struct QueryConfig {
    double gamma = 1.0;   // maximum per-word cluster weight
    double epsilon = 0.35; // must match the index manifest
    int k = 50;            // result depth
    int fusion_n = 100;    // candidate-list depth for the combination
};

QueryConfig make_query_config(const Index& index);

struct ScoredDoc {
    std::string doc_id;
    double score = 0.0;
    int rank = 0;
};

struct ScoredList {
    std::string query_id;
    std::string tag;
    std::vector<ScoredDoc> entries;
};

struct QueryVector {
    std::string query_id;
    std::map<int, double> weights;
};

// Semantic proximity of a word to a cluster centroid: the cosine distance
// when it is within epsilon, no-match otherwise.
std::optional<double> cluster_proximity(const Vec& centroid, const Vec& word_vec,
                                        double epsilon);

// Linear falloff gamma * (epsilon - d) / epsilon: gamma at distance 0, zero
// at distance epsilon.
double proximity_weight(double distance, double gamma, double epsilon);

// Per-word cluster weight: gamma on exact surface membership; otherwise the
// proximity falloff for non-singleton clusters. NE words and singleton
// clusters match by surface only.
double query_cluster_weight(const Token& w, const Vec* word_vec, const Cluster& c,
                            const QueryConfig& cfg);

// Sums query_cluster_weight over every query token occurrence; zero-weight
// clusters are omitted.
QueryVector build_query_vector(const Query& query, const Index& index,
                               const EmbeddingTable& table, const QueryConfig& cfg);

// Cosine between sparse cluster vectors; 0 when either is empty.
double rsv_cosine(const DocVector& dvec, const QueryVector& qvec);

ScoredList search_semantic(const Query& query, const Index& index,
                           const EmbeddingTable& table, const QueryConfig& cfg);

ScoredList search_bm25(const Query& query, const Index& index, const QueryConfig& cfg);

// Affine min-max map of bm25 scores onto [sem_min, sem_max]; a constant
// series maps to the interval midpoint.
std::vector<double> normalize_bm25(const std::vector<double>& scores, double sem_min,
                                   double sem_max);

// Borda-derived combination over the union of both lists: each document
// scores (N - n) * semantic + (N - m) * ln(1 + normalized bm25), ranks beyond
// the lists counting as N + 1 with score 0 and negative factors clamped.
ScoredList fuse(const ScoredList& semantic, const ScoredList& lexical, int n);

ScoredList search_combined(const Query& query, const Index& index,
                           const EmbeddingTable& table, const QueryConfig& cfg);

// tf-idf weighted mean of the embedded tokens' vectors; zero vector when no
// token is embedded or all weights clamp to zero.
Vec avg_vector(const std::vector<Token>& tokens, const EmbeddingTable& table,
               int n_docs, const std::map<std::string, int>& term_df);

// Embedding-average baseline: documents and queries are compared by the
// cosine of their weighted average vectors. Documents whose average vector is
// zero are not retrievable.
struct AvgBaseline {
    PipelineConfig pipeline;
    int n_docs = 0;
    std::map<std::string, int> term_df;
    std::vector<std::pair<std::string, Vec>> doc_vectors; // non-zero only, corpus order

    static AvgBaseline build(const std::vector<Document>& corpus,
                             const EmbeddingTable& table, const PipelineConfig& cfg);
    ScoredList search(const Query& query, const EmbeddingTable& table,
                      const QueryConfig& cfg) const;
};

std::vector<RunEntry> to_run_entries(const ScoredList& list);

} // namespace clusterir
