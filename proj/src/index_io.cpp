#include "clusterir/index_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "clusterir/corpus_io.hpp"
#include "clusterir/error.hpp"

namespace clusterir {

namespace {

using nlohmann::json;

constexpr int kFormatVersion = 1;

const char* kManifestFile = "manifest.json";
const char* kClustersFile = "clusters.jsonl";
const char* kDocsFile = "docs.jsonl";
const char* kStatsFile = "stats.json";
const char* kStopwordsFile = "stopwords.txt";
const char* kGazetteerFile = "gazetteer.txt";

std::string read_file_or_throw(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw CorruptIndexError("index: missing or unreadable file: " + path.string());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

json parse_or_throw(const std::string& text, const std::filesystem::path& path) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw CorruptIndexError("index: invalid JSON in " + path.string() + ": " + e.what());
    }
}

std::string dump_word_list(const std::unordered_set<std::string>& words) {
    std::vector<std::string> sorted(words.begin(), words.end());
    std::sort(sorted.begin(), sorted.end());
    std::string out;
    for (const std::string& w : sorted) {
        out += w;
        out += '\n';
    }
    return out;
}

std::unordered_set<std::string> load_word_list(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw CorruptIndexError("index: missing or unreadable file: " + path.string());
    std::unordered_set<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) words.insert(line);
    }
    return words;
}

} // namespace

void save_index(const Index& index, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("index: cannot create directory " + dir.string());

    json manifest = {
        {"format_version", index.manifest.format_version},
        {"epsilon", index.manifest.epsilon},
        {"epsilon_estimated", index.manifest.epsilon_estimated},
        {"gamma", index.manifest.gamma},
        {"k1", index.manifest.k1},
        {"b", index.manifest.b},
        {"rw_threshold", index.manifest.rw_threshold},
        {"log_base", "natural"},
        {"n_docs", static_cast<int>(index.docs.size())},
        {"n_clusters", static_cast<int>(index.clusters.size())},
    };
    atomic_write(dir / kManifestFile, manifest.dump(2) + "\n");

    std::ostringstream clusters;
    for (const Cluster& c : index.clusters.clusters) {
        json j = {
            {"id", c.id},
            {"singleton", c.singleton},
            {"words", c.words},
            {"dists", c.dists},
        };
        j["centroid"] = c.has_centroid() ? json(c.centroid) : json(nullptr);
        clusters << j.dump() << '\n';
    }
    atomic_write(dir / kClustersFile, clusters.str());

    std::ostringstream docs;
    for (std::size_t i = 0; i < index.docs.size(); ++i) {
        const DocTerms& d = index.docs[i];
        json vec = json::object();
        for (const auto& [cid, alpha] : index.doc_vectors[i].weights)
            vec[std::to_string(cid)] = alpha;
        json j = {{"id", d.id}, {"len", d.len}, {"tf", d.tf}, {"vec", vec}};
        docs << j.dump() << '\n';
    }
    atomic_write(dir / kDocsFile, docs.str());

    json cluster_df = json::object();
    for (const auto& [cid, n] : index.stats.cluster_df)
        cluster_df[std::to_string(cid)] = n;
    json stats = {
        {"n_docs", index.stats.n_docs},
        {"avg_doc_len", index.stats.avg_doc_len},
        {"cluster_df", cluster_df},
        {"term_df", index.stats.term_df},
    };
    atomic_write(dir / kStatsFile, stats.dump(2) + "\n");

    atomic_write(dir / kStopwordsFile, dump_word_list(index.pipeline.stopwords));
    atomic_write(dir / kGazetteerFile, dump_word_list(index.pipeline.gazetteer));
}

Index load_index(const std::filesystem::path& dir) {
    json manifest = parse_or_throw(read_file_or_throw(dir / kManifestFile),
                                   dir / kManifestFile);
    if (!manifest.contains("format_version") || !manifest["format_version"].is_number())
        throw CorruptIndexError("index: manifest has no format version: " + dir.string());
    int version = manifest["format_version"].get<int>();
    if (version != kFormatVersion)
        throw IncompatibleIndexError("index: format version " + std::to_string(version) +
                                     " is not supported (expected " +
                                     std::to_string(kFormatVersion) + ")");

    Index index;
    try {
        index.manifest.format_version = version;
        index.manifest.epsilon = manifest.at("epsilon").get<double>();
        index.manifest.epsilon_estimated = manifest.at("epsilon_estimated").get<bool>();
        index.manifest.gamma = manifest.at("gamma").get<double>();
        index.manifest.k1 = manifest.at("k1").get<double>();
        index.manifest.b = manifest.at("b").get<double>();
        index.manifest.rw_threshold = manifest.at("rw_threshold").get<int>();
    } catch (const json::exception& e) {
        throw CorruptIndexError("index: incomplete manifest in " + dir.string() + ": " +
                                e.what());
    }

    // Clusters, in id order, one JSON object per line.
    {
        std::istringstream in(read_file_or_throw(dir / kClustersFile));
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            json j = parse_or_throw(line, dir / kClustersFile);
            Cluster c;
            try {
                c.id = j.at("id").get<int>();
                c.singleton = j.at("singleton").get<bool>();
                c.words = j.at("words").get<std::vector<std::string>>();
                c.dists = j.at("dists").get<std::vector<double>>();
                if (!j.at("centroid").is_null()) c.centroid = j.at("centroid").get<Vec>();
            } catch (const json::exception& e) {
                throw CorruptIndexError("index: malformed cluster record: " +
                                        std::string(e.what()));
            }
            if (c.id != static_cast<int>(index.clusters.clusters.size()) || c.words.empty())
                throw CorruptIndexError("index: cluster records out of order or empty");
            for (const std::string& w : c.words) {
                if (!index.clusters.word_to_cluster.emplace(w, c.id).second)
                    throw CorruptIndexError("index: word '" + w +
                                            "' appears in two clusters");
            }
            index.clusters.clusters.push_back(std::move(c));
        }
    }

    // Documents: term frequencies and stored cluster vectors.
    {
        std::istringstream in(read_file_or_throw(dir / kDocsFile));
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            json j = parse_or_throw(line, dir / kDocsFile);
            DocTerms d;
            DocVector dv;
            try {
                d.id = j.at("id").get<std::string>();
                d.len = j.at("len").get<int>();
                d.tf = j.at("tf").get<std::map<std::string, int>>();
                dv.doc_id = d.id;
                for (const auto& [cid, alpha] : j.at("vec").items())
                    dv.weights[std::stoi(cid)] = alpha.get<double>();
            } catch (const std::exception& e) {
                throw CorruptIndexError("index: malformed document record: " +
                                        std::string(e.what()));
            }
            double sq = 0.0;
            for (const auto& [cid, alpha] : dv.weights) sq += alpha * alpha;
            dv.norm = std::sqrt(sq);
            if (!index.doc_pos.emplace(d.id, static_cast<int>(index.docs.size())).second)
                throw CorruptIndexError("index: duplicate document id '" + d.id + "'");
            index.docs.push_back(std::move(d));
            index.doc_vectors.push_back(std::move(dv));
        }
    }

    // Statistics.
    {
        json stats = parse_or_throw(read_file_or_throw(dir / kStatsFile), dir / kStatsFile);
        try {
            index.stats.n_docs = stats.at("n_docs").get<int>();
            index.stats.avg_doc_len = stats.at("avg_doc_len").get<double>();
            index.stats.term_df = stats.at("term_df").get<std::map<std::string, int>>();
            for (const auto& [cid, n] : stats.at("cluster_df").items())
                index.stats.cluster_df[std::stoi(cid)] = n.get<int>();
        } catch (const std::exception& e) {
            throw CorruptIndexError("index: malformed statistics: " + std::string(e.what()));
        }
        if (index.stats.n_docs != static_cast<int>(index.docs.size()))
            throw CorruptIndexError("index: document count disagrees with statistics");
        for (const DocTerms& d : index.docs) index.stats.doc_len[d.id] = d.len;
    }

    index.pipeline.stopwords = load_word_list(dir / kStopwordsFile);
    index.pipeline.gazetteer = load_word_list(dir / kGazetteerFile);
    index.pipeline.rw_threshold = index.manifest.rw_threshold;

    // Postings are derived, not stored.
    for (std::size_t i = 0; i < index.docs.size(); ++i) {
        for (const auto& [cid, alpha] : index.doc_vectors[i].weights)
            index.cluster_postings[cid].emplace_back(static_cast<int>(i), alpha);
        for (const auto& [surface, tf] : index.docs[i].tf)
            index.term_postings[surface].emplace_back(static_cast<int>(i), tf);
    }
    return index;
}

} // namespace clusterir
