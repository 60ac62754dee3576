#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mfs/ifs.hpp"
#include "mfs/kernels.hpp"

namespace mfs {

// One exact-overlap class at depth n. The scaled translation
// S_u = sum_p a_{u_p} beta^{n-p} is stored as an integer coefficient vector
// `v` over the level's common denominator, so equal vectors mean equal maps.
struct CensusClass {
    std::string key;                 // serialized limbs of v
    std::vector<Integer> v;
    Rational mass;                   // aggregated weight p~
    Integer words;                   // number of words in the class
    std::vector<std::uint8_t> rep;   // lexicographically smallest word
    std::vector<std::complex<double>> emb;  // S_u at every conjugate
};

struct CensusLevel {
    int n = 0;
    Integer denom = 1;  // S_u = v / denom
    std::vector<CensusClass> classes;  // sorted by key

    std::size_t size() const { return classes.size(); }
};

struct CensusOptions {
    std::size_t class_budget = 50'000'000;
    Exec exec = Exec::Parallel;
};

// Data needed to grow one level from the previous one.
struct ExpansionData {
    FieldPtr field;
    int l = 0;
    std::vector<std::vector<Integer>> B;      // D_B * multiplication matrix of beta
    Integer DB = 1;                           // denominator of the beta matrix
    std::vector<std::vector<Integer>> A;      // D_a * a_i coefficient vectors
    Integer Da = 1;
    std::vector<Rational> p;                  // exact weights
    std::vector<std::complex<double>> beta_conj;
    std::vector<std::vector<std::complex<double>>> a_conj;  // a_i at every conjugate
};

// Serialized limbs of an integer coefficient vector; the class hash key.
std::string census_key(const std::vector<Integer>& v);

ExpansionData make_expansion_data(const WeightedIFS& ifs);
CensusLevel first_level(const ExpansionData& x);
// Kernel: classes at depth n+1 from classes at depth n. Throws BudgetError
// when the child count would exceed `budget`.
CensusLevel expand_level(const CensusLevel& parent, const ExpansionData& x, std::size_t budget, Exec exec);

class OverlapCensus {
public:
    // Requires a homogeneous algebraic system.
    static OverlapCensus run(const WeightedIFS& ifs, int n_max, const CensusOptions& opt = {});
    // Continues to depth n_max (used after loading a snapshot).
    void extend(int n_max, const CensusOptions& opt = {});

    int depth() const { return static_cast<int>(levels_.size()); }
    const CensusLevel& level(int n) const { return levels_.at(static_cast<std::size_t>(n - 1)); }
    bool partial() const { return partial_; }
    const std::string& partial_reason() const { return partial_reason_; }
    const WeightedIFS& ifs() const { return ifs_; }
    const ExpansionData& data() const { return data_; }
    double log_abs_beta() const { return log_beta_; }

    std::size_t N(int n) const { return level(n).size(); }
    AlgebraicNumber scaled_translation(int n, std::size_t k) const;
    // beta * S_u at the distinguished embedding, i.e. beta^n times the translation of phi_u.
    double rescaled_real(int n, std::size_t k) const;

    void save(const std::string& path) const;
    static OverlapCensus load(const std::string& path, const WeightedIFS& ifs);

private:
    WeightedIFS ifs_;
    ExpansionData data_;
    std::vector<CensusLevel> levels_;
    double log_beta_ = 0;
    bool partial_ = false;
    std::string partial_reason_;
};

// Canonical form of one word computed directly by Horner's rule (no class
// table). Used as the independent reference for the incremental expansion.
AlgebraicNumber word_scaled_translation(const WeightedIFS& ifs, const std::vector<int>& word);

struct GrowthExponent {
    std::vector<double> per_n;  // log N_n / (n log|beta|), index n-1
    double upper_bound = 0;     // min over n
    double estimate = 0;        // last value
};

GrowthExponent growth_exponent(const OverlapCensus& c);

struct DimKEstimate {
    double estimate = 0;     // min{1, last growth value}
    double upper_bound = 0;  // min{1, min over n}
};

DimKEstimate dim_K_estimate(const OverlapCensus& c);

enum class TnVariant { WnDyadic, SigmaBeta };

struct TnResult {
    int n = 0;
    long long t = 0;
    int word_depth = 0;        // depth of the words used
    bool upper_bound = true;   // hull of K stands in for K
    bool available = false;
};

// Max number of distinct maps whose images of hull(K), inflated by 2^-n
// (dyadic) or |beta|^-n (beta variant), share a point. With refine > 0 the
// hull is replaced by its images under the distinct maps of that depth.
TnResult t_n_homogeneous(const OverlapCensus& c, const Hull1D& hull, int n, TnVariant variant, int refine = 0);
// Dyadic variant for any one-dimensional system, by enumerating W_n. Exact
// for rational systems, numeric (every word its own map) otherwise.
TnResult t_n_section(const WeightedIFS& ifs, const Hull1D& hull, int n, std::size_t budget = 100'000'000);

struct EscRow {
    int n = 0;
    double delta = 0;        // 0 when an exact overlap exists
    double delta_tilde = 0;  // min distance between distinct maps
    bool overlap = false;
};

struct EscDiagnostic {
    std::vector<EscRow> rows;
    std::optional<int> first_overlap;
    double fitted_c = 0;  // exp(slope of log delta_tilde_n against n)
};

EscDiagnostic esc_diagnostic(const OverlapCensus& c);

// log(sum p~^q) / (-n log|beta|).
double T_n(const OverlapCensus& c, int n, double q);

struct GarsiaRow {
    int n = 0;
    double h = 0;          // sum -p~ log p~
    double rate = 0;       // h / (n log|beta|)
    double estimate = 0;   // min{1, rate}
};

std::vector<GarsiaRow> garsia_dimension(const OverlapCensus& c);

struct CensusInvariants {
    bool mass_sums_exact = true;
    bool submultiplicative = true;
    bool entropy_subadditive = true;
    bool t_monotone = true;
    bool pigeonhole = true;
    std::vector<std::string> failures;
};

// Literal checks of the structural invariants on a computed census. The t_n
// table is the beta variant indexed by n - 1.
CensusInvariants check_census(const OverlapCensus& c, const std::vector<TnResult>& t_beta, const Hull1D& hull);

struct RationalBoundRow {
    int n = 0;
    long long t = 0;
    Integer bound;
    bool ok = true;
};

struct RationalBoundCheck {
    Integer Q, r, max_m;
    Rational diam;
    std::vector<RationalBoundRow> rows;
    bool ok = true;
};

// Integer contraction factors with rational translations: t_n (dyadic variant)
// must stay strictly below (n+1)^l (r + 2 Q max|m_i| + 1)^d. Throws
// CorrectnessAlarm on violation.
RationalBoundCheck rational_bound_check(const WeightedIFS& ifs, int n_max, std::size_t budget = 100'000'000,
                                        const OverlapCensus* census = nullptr);

}  // namespace mfs
