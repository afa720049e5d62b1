#include "clusterir/cluster.hpp"

#include <algorithm>
#include <limits>

#include "clusterir/error.hpp"
#include "clusterir/vec_math.hpp"

namespace clusterir {

namespace {

struct Closest {
    int id = -1;
    double dist = 0.0;
};

std::optional<Closest> closest_cluster(const ClusterSet& cs, const Vec& wvec,
                                       double epsilon, int* distance_evals) {
    std::optional<Closest> best;
    double best_d = std::numeric_limits<double>::infinity();
    for (const Cluster& c : cs.clusters) {
        if (c.singleton || !c.has_centroid()) continue;
        double d = cosine_distance(c.centroid, wvec);
        if (distance_evals) ++*distance_evals;
        if (d <= epsilon && d < best_d) {
            best = Closest{c.id, d};
            best_d = d;
        }
    }
    return best;
}

int create_cluster(ClusterSet& cs, const WordInsert& w, bool singleton) {
    Cluster c;
    c.id = static_cast<int>(cs.clusters.size());
    if (w.vector) c.centroid = *w.vector;
    c.words.push_back(w.surface);
    c.dists.push_back(0.0);
    c.singleton = singleton;
    cs.word_to_cluster[w.surface] = c.id;
    cs.clusters.push_back(std::move(c));
    return static_cast<int>(cs.clusters.size()) - 1;
}

} // namespace

double estimate_epsilon(const std::vector<std::pair<std::string, std::string>>& pairs,
                        const EmbeddingTable& table) {
    if (pairs.empty())
        throw DomainError("estimate_epsilon: no synonym pairs given");
    double sum = 0.0;
    for (const auto& [a, b] : pairs) {
        const Vec* va = table.find(a);
        if (!va) throw LookupError("estimate_epsilon: no embedding for word '" + a + "'");
        const Vec* vb = table.find(b);
        if (!vb) throw LookupError("estimate_epsilon: no embedding for word '" + b + "'");
        sum += cosine_distance(*va, *vb);
    }
    return sum / static_cast<double>(pairs.size());
}

std::optional<int> find_closest_cluster(const ClusterSet& cs, const Vec& wvec,
                                        double epsilon, int* distance_evals) {
    auto best = closest_cluster(cs, wvec, epsilon, distance_evals);
    if (!best) return std::nullopt;
    return best->id;
}

int insert_word(ClusterSet& cs, const WordInsert& w, double epsilon,
                InsertionRecord* rec) {
    if (w.surface.empty())
        throw ValidationError("insert_word: empty surface");
    if (cs.contains(w.surface))
        throw ValidationError("insert_word: surface '" + w.surface +
                              "' is already clustered");
    if (rec) {
        *rec = InsertionRecord{};
        rec->surface = w.surface;
        rec->label = w.label;
        rec->has_vector = w.vector != nullptr;
        rec->clusters_before = static_cast<int>(cs.clusters.size());
    }

    bool forced_singleton = w.label != Label::Plain || w.vector == nullptr;
    if (cs.clusters.empty() || forced_singleton) {
        int id = create_cluster(cs, w, forced_singleton);
        if (rec) {
            rec->cluster_id = id;
            rec->created_new = true;
        }
        return id;
    }

    int evals = 0;
    auto best = closest_cluster(cs, *w.vector, epsilon, &evals);
    if (rec) rec->distance_evals = evals;
    if (best) {
        Cluster& c = cs.clusters[best->id];
        c.words.push_back(w.surface);
        c.dists.push_back(best->dist);
        cs.word_to_cluster[w.surface] = c.id;
        if (rec) {
            rec->cluster_id = c.id;
            rec->distance = best->dist;
        }
        return c.id;
    }
    int id = create_cluster(cs, w, false);
    if (rec) {
        rec->cluster_id = id;
        rec->created_new = true;
    }
    return id;
}

ClusterSet build_clusters(const Vocabulary& vocab, const EmbeddingTable& table,
                          const ClusterConfig& cfg,
                          std::vector<InsertionRecord>* log) {
    if (!(cfg.epsilon > 0.0 && cfg.epsilon < 1.0))
        throw DomainError("build_clusters: epsilon must be in (0, 1)");

    // Frequent words seed centroids first; ties resolved lexicographically so
    // the build is deterministic.
    std::vector<std::pair<std::string, const VocabEntry*>> order;
    order.reserve(vocab.entries.size());
    for (const auto& [surface, entry] : vocab.entries) order.emplace_back(surface, &entry);
    std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
        if (a.second->term_freq != b.second->term_freq)
            return a.second->term_freq > b.second->term_freq;
        return a.first < b.first;
    });

    ClusterSet cs;
    for (const auto& [surface, entry] : order) {
        WordInsert w;
        w.surface = surface;
        w.label = entry->label;
        w.vector = table.find(surface);
        if (log) {
            InsertionRecord rec;
            insert_word(cs, w, cfg.epsilon, &rec);
            log->push_back(std::move(rec));
        } else {
            insert_word(cs, w, cfg.epsilon);
        }
    }
    return cs;
}

} // namespace clusterir
