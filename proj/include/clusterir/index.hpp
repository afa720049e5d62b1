#pragma once

#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "clusterir/cluster.hpp"
#include "clusterir/embedding.hpp"
#include "clusterir/text_pipeline.hpp"
#include "clusterir/types.hpp"

namespace clusterir {

struct CorpusStats {
    int n_docs = 0;
    double avg_doc_len = 0.0;
    std::map<std::string, int> doc_len;
    // cluster id -> number of documents containing at least one of its words
    std::map<int, int> cluster_df;
    // surface -> number of documents containing it
    std::map<std::string, int> term_df;
};

// Tokenized form of one document: length and per-surface term frequencies.
struct DocTerms {
    std::string id;
    int len = 0;
    std::map<std::string, int> tf;
};

// Sparse document vector in cluster space; weights are strictly positive.
struct DocVector {
    std::string doc_id;
    std::map<int, double> weights;
    double norm = 0.0;
};

struct IndexConfig {
    double epsilon = 0.35;
    bool epsilon_estimated = false;
    double gamma = 1.0;
    double k1 = 1.2;
    double b = 0.75;
    PipelineConfig pipeline;
};

struct IndexManifest {
    int format_version = 1;
    double epsilon = 0.35;
    bool epsilon_estimated = false;
    double gamma = 1.0;
    double k1 = 1.2;
    double b = 0.75;
    int rw_threshold = 1;
};

struct Index {
    IndexManifest manifest;
    PipelineConfig pipeline;
    ClusterSet clusters;
    std::vector<DocTerms> docs;          // corpus order
    std::vector<DocVector> doc_vectors;  // aligned with docs
    std::unordered_map<std::string, int> doc_pos;
    CorpusStats stats;
    // cluster id -> (doc ordinal, weight), docs in corpus order
    std::map<int, std::vector<std::pair<int, double>>> cluster_postings;
    // surface -> (doc ordinal, term frequency), docs in corpus order
    std::map<std::string, std::vector<std::pair<int, int>>> term_postings;

    int doc_ordinal(const std::string& doc_id) const;
};

// Sum of the term frequencies of the cluster's words in the document.
int cluster_frequency(const DocTerms& doc, const Cluster& c);

// Fraction of the cluster's words that occur in the document, in [0, 1].
double cluster_coverage(const DocTerms& doc, const Cluster& c);

// Cluster weight: coverage * ln(1 + cluster_frequency) * ln(N / (N_i + 1)),
// with the idf factor clamped at zero.
double cluster_weight(const DocTerms& doc, const Cluster& c, const CorpusStats& stats);

DocVector build_doc_vector(const DocTerms& doc, const ClusterSet& cs,
                           const CorpusStats& stats);

// Full pipeline: preprocess -> vocabulary -> clustering -> document vectors ->
// postings -> statistics. An empty corpus yields a valid empty index.
Index build_index(const std::vector<Document>& corpus, const EmbeddingTable& table,
                  const IndexConfig& cfg);

// Incremental insertion: new vocabulary words join the existing clusters via
// the single-pass rule (centroids never move); statistics and all document
// vectors are refreshed since the idf terms depend on the corpus size.
void add_document(Index& index, const Document& doc, const EmbeddingTable& table);

// Okapi BM25 over the query token surfaces, summed per occurrence.
double bm25_score(const std::vector<std::string>& query_terms,
                  const std::string& doc_id, const Index& index);

} // namespace clusterir
