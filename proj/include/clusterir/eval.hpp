#pragma once

#include <map>
#include <string>
#include <vector>

#include "clusterir/types.hpp"

namespace clusterir {

struct QueryMetrics {
    double ap = 0.0;
    double r_prec = 0.0;
    double rr = 0.0;
    std::map<int, double> p_at;
    std::map<int, double> r_at;
    int relevant_total = 0;
};

struct MetricsReport {
    std::map<std::string, QueryMetrics> per_query;
    double map = 0.0;
    double mean_r_prec = 0.0;
    double mrr = 0.0;
    std::map<int, double> mean_p_at;
    std::map<int, double> mean_r_at;
    int query_count = 0;   // queries with at least one relevant document
    int skipped = 0;       // run queries without relevant documents in qrels
};

struct TTestResult {
    double t = 0.0;
    int df = 0;
    double p = 1.0;
    double mean_diff = 0.0;
    bool no_difference = false; // all paired differences were zero
};

// Run entries for one query, ordered by rank.
using QueryRun = std::vector<RunEntry>;
// query id -> ordered entries.
using RunsByQuery = std::map<std::string, QueryRun>;

RunsByQuery group_run(const std::vector<RunEntry>& entries);

// P@k counts missing ranks as non-relevant (denominator stays k); R@k divides
// by the total number of relevant documents.
std::pair<double, double> precision_recall_at_k(const QueryRun& run, const Qrels& qrels,
                                                int k);

double average_precision(const QueryRun& run, const Qrels& qrels);
double r_precision(const QueryRun& run, const Qrels& qrels);
double reciprocal_rank(const QueryRun& run, const Qrels& qrels);

double map_over(const RunsByQuery& runs, const Qrels& qrels);
double mrr(const RunsByQuery& runs, const Qrels& qrels);

// Paired Student's t-test with sample standard deviation; two-sided p value.
// Series must be aligned and of equal length >= 2.
TTestResult paired_t_test(const std::vector<double>& a, const std::vector<double>& b);

// Full per-query and aggregate report; queries without relevant documents are
// skipped and tallied.
MetricsReport evaluate_run(const RunsByQuery& runs, const Qrels& qrels,
                           const std::vector<int>& k_values);

// Replaces each lexicon-mapped token with probability p by a uniformly chosen
// synonym; deterministic for a fixed seed, byte-identity at p = 0.
std::vector<Query> reformulate_queries(const std::vector<Query>& queries,
                                       const SynonymLexicon& lexicon, double p,
                                       unsigned seed);

// I_x(a, b) via the continued-fraction expansion; accurate to ~1e-10.
double regularized_incomplete_beta(double a, double b, double x);

// Two-sided p value for a t statistic with df degrees of freedom.
double student_t_two_sided_p(double t, int df);

} // namespace clusterir
