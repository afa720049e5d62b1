#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "clusterir/embedding.hpp"
#include "clusterir/text_pipeline.hpp"
#include "clusterir/types.hpp"

namespace clusterir {

struct ClusterConfig {
    // Cosine-distance threshold for cluster membership, in (0, 1).
    double epsilon = 0.35;
};

struct Cluster {
    int id = 0;
    // Frozen copy of the first inserted word's vector; empty when the seed
    // word has no embedding.
    Vec centroid;
    // Insertion order; words[0] seeded the centroid.
    std::vector<std::string> words;
    // Distance of each word to the centroid at insertion time (0 for the seed).
    std::vector<double> dists;
    // NE/RW/vector-less clusters hold exactly one word and never take part in
    // soft matching.
    bool singleton = false;

    bool has_centroid() const { return !centroid.empty(); }
};

struct ClusterSet {
    std::vector<Cluster> clusters;
    std::unordered_map<std::string, int> word_to_cluster;

    bool contains(const std::string& surface) const {
        return word_to_cluster.count(surface) > 0;
    }
    std::optional<int> cluster_of(const std::string& surface) const {
        auto it = word_to_cluster.find(surface);
        if (it == word_to_cluster.end()) return std::nullopt;
        return it->second;
    }
    std::size_t size() const { return clusters.size(); }
};

struct WordInsert {
    std::string surface;
    Label label = Label::Plain;
    const Vec* vector = nullptr; // nullptr when the word has no embedding
};

// One line of the insertion log, enough to replay and audit a build.
struct InsertionRecord {
    std::string surface;
    Label label = Label::Plain;
    bool has_vector = false;
    int clusters_before = 0;
    int distance_evals = 0;
    int cluster_id = -1;
    bool created_new = false;
    double distance = 0.0; // to the joined centroid; 0 when a cluster was created
};

// Mean cosine distance over known-synonym pairs; the membership threshold.
double estimate_epsilon(const std::vector<std::pair<std::string, std::string>>& pairs,
                        const EmbeddingTable& table);

// Id of the non-singleton cluster whose centroid is closest to wvec among
// those within epsilon; ties go to the lowest id. Singleton clusters are
// never candidates.
std::optional<int> find_closest_cluster(const ClusterSet& cs, const Vec& wvec,
                                        double epsilon, int* distance_evals = nullptr);

// Single-pass insertion: NE/RW and vector-less words always seed a singleton
// cluster; plain words join the closest cluster within epsilon or seed a new
// one. Centroids never change after creation. Returns the cluster id.
int insert_word(ClusterSet& cs, const WordInsert& w, double epsilon,
                InsertionRecord* rec = nullptr);

// Inserts every vocabulary surface exactly once, in descending term-frequency
// order (ties by surface). Cost per word is one distance evaluation per
// existing non-singleton cluster.
ClusterSet build_clusters(const Vocabulary& vocab, const EmbeddingTable& table,
                          const ClusterConfig& cfg,
                          std::vector<InsertionRecord>* log = nullptr);

} // namespace clusterir
