#include "clusterir/eval.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <random>

#include "clusterir/error.hpp"

namespace clusterir {

namespace {

bool is_word_byte(unsigned char c) {
    return std::isalnum(c) || c >= 0x80;
}

std::string lowercase_ascii(std::string s) {
    for (char& c : s) {
        unsigned char u = static_cast<unsigned char>(c);
        if (u < 0x80) c = static_cast<char>(std::tolower(u));
    }
    return s;
}

// Continued fraction for the incomplete beta function (Lentz's method).
double beta_cf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 1e-12;
    constexpr double kFpMin = 1e-300;

    double qab = a + b;
    double qap = a + 1.0;
    double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

} // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0 && b > 0.0))
        throw DomainError("incomplete beta: parameters must be positive");
    if (x < 0.0 || x > 1.0)
        throw DomainError("incomplete beta: x outside [0, 1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    double bt = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                         a * std::log(x) + b * std::log(1.0 - x));
    if (x < (a + 1.0) / (a + b + 2.0)) return bt * beta_cf(a, b, x) / a;
    return 1.0 - bt * beta_cf(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, int df) {
    if (df < 1)
        throw DomainError("t-test: degrees of freedom must be >= 1");
    if (std::isinf(t)) return 0.0;
    double x = df / (df + t * t);
    return regularized_incomplete_beta(df / 2.0, 0.5, x);
}

RunsByQuery group_run(const std::vector<RunEntry>& entries) {
    RunsByQuery runs;
    for (const RunEntry& e : entries) runs[e.query_id].push_back(e);
    for (auto& [qid, run] : runs)
        std::sort(run.begin(), run.end(),
                  [](const RunEntry& a, const RunEntry& b) { return a.rank < b.rank; });
    return runs;
}

std::pair<double, double> precision_recall_at_k(const QueryRun& run, const Qrels& qrels,
                                                int k) {
    if (k < 1)
        throw DomainError("precision_recall_at_k: k must be >= 1");
    if (run.empty()) return {0.0, 0.0};
    const std::string& qid = run.front().query_id;
    int total_relevant = qrels.relevant_count(qid);
    int hits = 0;
    for (const RunEntry& e : run) {
        if (e.rank > k) break;
        if (qrels.is_relevant(qid, e.doc_id)) ++hits;
    }
    double p = static_cast<double>(hits) / k;
    double r = total_relevant > 0 ? static_cast<double>(hits) / total_relevant : 0.0;
    return {p, r};
}

double average_precision(const QueryRun& run, const Qrels& qrels) {
    if (run.empty()) return 0.0;
    const std::string& qid = run.front().query_id;
    int total_relevant = qrels.relevant_count(qid);
    if (total_relevant == 0) return 0.0;
    int hits = 0;
    double sum = 0.0;
    for (const RunEntry& e : run) {
        if (qrels.is_relevant(qid, e.doc_id)) {
            ++hits;
            sum += static_cast<double>(hits) / e.rank;
        }
    }
    return sum / total_relevant;
}

double r_precision(const QueryRun& run, const Qrels& qrels) {
    if (run.empty()) return 0.0;
    const std::string& qid = run.front().query_id;
    int total_relevant = qrels.relevant_count(qid);
    if (total_relevant == 0) return 0.0;
    int hits = 0;
    for (const RunEntry& e : run) {
        if (e.rank > total_relevant) break;
        if (qrels.is_relevant(qid, e.doc_id)) ++hits;
    }
    return static_cast<double>(hits) / total_relevant;
}

double reciprocal_rank(const QueryRun& run, const Qrels& qrels) {
    if (run.empty()) return 0.0;
    const std::string& qid = run.front().query_id;
    for (const RunEntry& e : run) {
        if (qrels.is_relevant(qid, e.doc_id)) return 1.0 / e.rank;
    }
    return 0.0;
}

double map_over(const RunsByQuery& runs, const Qrels& qrels) {
    double sum = 0.0;
    int n = 0;
    for (const auto& [qid, run] : runs) {
        if (qrels.relevant_count(qid) == 0) continue;
        sum += average_precision(run, qrels);
        ++n;
    }
    return n > 0 ? sum / n : 0.0;
}

double mrr(const RunsByQuery& runs, const Qrels& qrels) {
    double sum = 0.0;
    int n = 0;
    for (const auto& [qid, run] : runs) {
        if (qrels.relevant_count(qid) == 0) continue;
        sum += reciprocal_rank(run, qrels);
        ++n;
    }
    return n > 0 ? sum / n : 0.0;
}

TTestResult paired_t_test(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size())
        throw ValidationError("t-test: series lengths differ");
    if (a.size() < 2)
        throw DomainError("t-test: need at least 2 paired samples");
    int n = static_cast<int>(a.size());

    TTestResult res;
    res.df = n - 1;
    double mean = 0.0;
    for (int i = 0; i < n; ++i) mean += a[i] - b[i];
    mean /= n;
    res.mean_diff = mean;

    double sq = 0.0;
    bool all_zero = true;
    for (int i = 0; i < n; ++i) {
        double d = a[i] - b[i];
        if (d != 0.0) all_zero = false;
        sq += (d - mean) * (d - mean);
    }
    if (all_zero) {
        res.no_difference = true;
        res.t = 0.0;
        res.p = 1.0;
        return res;
    }
    double sd = std::sqrt(sq / (n - 1));
    if (sd == 0.0) {
        // Constant non-zero difference: the statistic diverges.
        res.t = mean > 0 ? std::numeric_limits<double>::infinity()
                         : -std::numeric_limits<double>::infinity();
        res.p = 0.0;
        return res;
    }
    res.t = mean / (sd / std::sqrt(static_cast<double>(n)));
    res.p = student_t_two_sided_p(res.t, res.df);
    return res;
}

MetricsReport evaluate_run(const RunsByQuery& runs, const Qrels& qrels,
                           const std::vector<int>& k_values) {
    for (int k : k_values) {
        if (k < 1) throw DomainError("evaluate_run: cutoff values must be >= 1");
    }
    MetricsReport report;
    for (const auto& [qid, run] : runs) {
        int total_relevant = qrels.relevant_count(qid);
        if (total_relevant == 0) {
            ++report.skipped;
            continue;
        }
        QueryMetrics m;
        m.relevant_total = total_relevant;
        m.ap = average_precision(run, qrels);
        m.r_prec = r_precision(run, qrels);
        m.rr = reciprocal_rank(run, qrels);
        for (int k : k_values) {
            auto [p, r] = precision_recall_at_k(run, qrels, k);
            m.p_at[k] = p;
            m.r_at[k] = r;
        }
        report.map += m.ap;
        report.mean_r_prec += m.r_prec;
        report.mrr += m.rr;
        for (int k : k_values) {
            report.mean_p_at[k] += m.p_at[k];
            report.mean_r_at[k] += m.r_at[k];
        }
        report.per_query.emplace(qid, std::move(m));
        ++report.query_count;
    }
    if (report.query_count > 0) {
        report.map /= report.query_count;
        report.mean_r_prec /= report.query_count;
        report.mrr /= report.query_count;
        for (auto& [k, v] : report.mean_p_at) v /= report.query_count;
        for (auto& [k, v] : report.mean_r_at) v /= report.query_count;
    }
    return report;
}

std::vector<Query> reformulate_queries(const std::vector<Query>& queries,
                                       const SynonymLexicon& lexicon, double p,
                                       unsigned seed) {
    if (p < 0.0 || p > 1.0)
        throw DomainError("reformulate: probability must be in [0, 1]");
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> coin(0.0, 1.0);

    std::vector<Query> out;
    out.reserve(queries.size());
    for (const Query& q : queries) {
        std::string text;
        text.reserve(q.text.size());
        std::size_t i = 0;
        while (i < q.text.size()) {
            if (!is_word_byte(static_cast<unsigned char>(q.text[i]))) {
                text.push_back(q.text[i]);
                ++i;
                continue;
            }
            std::size_t j = i;
            while (j < q.text.size() && is_word_byte(static_cast<unsigned char>(q.text[j])))
                ++j;
            std::string word = q.text.substr(i, j - i);
            auto it = lexicon.pairs.find(lowercase_ascii(word));
            if (it != lexicon.pairs.end() && coin(rng) < p) {
                std::uniform_int_distribution<std::size_t> pick(0, it->second.size() - 1);
                text += it->second[pick(rng)];
            } else {
                text += word;
            }
            i = j;
        }
        out.push_back({q.id, std::move(text)});
    }
    return out;
}

} // namespace clusterir
