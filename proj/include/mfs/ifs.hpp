#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mfs/kernels.hpp"
#include "mfs/number_field.hpp"
#include "mfs/rational.hpp"

namespace mfs {

// phi(x) = sign * ratio * U x + translation. In one dimension U is dropped and
// `sign` carries the orientation; in higher dimensions `orthogonal` (row-major
// d x d, empty means identity) carries it and sign stays +1.
struct SimilarityMap {
    double ratio = 0.5;
    std::optional<Rational> ratio_exact;
    int sign = 1;
    std::vector<double> translation;
    std::optional<std::vector<AlgebraicNumber>> translation_exact;
    std::vector<double> orthogonal;
};

// phi_i(x) = x / m_i + a_i with integers |m_i| > 1 and rational a_i.
struct RationalIntegerMeta {
    std::vector<Integer> m;
    std::vector<std::vector<Rational>> a;  // per map, d coordinates
    Integer Q = 1;                          // lcm of all translation denominators
};

// phi_i(x) = x / beta + a_i with beta and every a_i in one number field.
struct AlgebraicMeta {
    AlgebraicNumber beta;
    bool homogeneous = true;
};

struct Assertions {
    std::optional<bool> osc;
    std::optional<bool> esc;
    bool dimensional_regular = false;
};

struct WeightedIFS {
    int ambient_dim = 1;
    std::vector<SimilarityMap> maps;
    std::vector<double> weights;
    std::optional<std::vector<Rational>> weights_exact;
    std::optional<AlgebraicMeta> algebraic;
    std::optional<RationalIntegerMeta> rational_integer;
    Assertions assertions;

    std::size_t size() const { return maps.size(); }
    std::vector<double> ratios() const;
    bool is_homogeneous_algebraic() const { return algebraic && algebraic->homogeneous; }
    // Exact ratio product available for every map.
    bool has_exact_ratios() const;
};

// Builders used by the config layer and the tests.
// Homogeneous system x/beta + a_i over `field` (beta real at the distinguished embedding).
WeightedIFS make_homogeneous(const AlgebraicNumber& beta, const std::vector<AlgebraicNumber>& translations,
                             std::vector<Rational> weights);
// One-dimensional system phi_i(x) = ratio_i x + a_i with signed rational ratios.
WeightedIFS make_rational_1d(const std::vector<Rational>& signed_ratios, const std::vector<Rational>& translations,
                             std::vector<Rational> weights);
// Numeric system from ratios only (translations default to spread-out fixed points).
WeightedIFS make_numeric(const std::vector<double>& ratios, const std::vector<double>& translations,
                         const std::vector<double>& weights, int ambient_dim = 1);
// Uniform weights 1/l.
std::vector<Rational> uniform_weights(std::size_t l);

// Attaches RationalIntegerMeta (and, for a common ratio 1/m, the field Q with
// beta = m) when every ratio is 1/m_i with integer |m_i| > 1 and every
// translation is rational. No-op otherwise.
void derive_rational_meta(WeightedIFS& ifs);

struct ValidationReport {
    bool ok = true;
    std::vector<std::string> issues;
};

ValidationReport validate(const WeightedIFS& ifs);
// Throws ParseError listing the issues when validation fails.
void require_valid(const WeightedIFS& ifs);

struct AttractorBound {
    std::vector<double> center;
    double radius = 0;
    bool verified = false;  // phi_i(B) subset of B for all i
};

AttractorBound attractor_bound(const WeightedIFS& ifs);

// Convex hull of K in one dimension. Exact endpoints are kept when the system
// carries exact data (algebraic for homogeneous systems, rational otherwise).
struct Hull1D {
    double lo = 0, hi = 0;
    std::optional<AlgebraicNumber> lo_alg, hi_alg;
    std::optional<Rational> lo_q, hi_q;
    bool exact = false;
    double diam() const { return hi - lo; }
};

Hull1D attractor_hull(const WeightedIFS& ifs);

// s with sum r_i^s = 1.
double similarity_dimension_set(const std::vector<double>& ratios);

// W_n stored flat: word k is letters[offsets[k] .. offsets[k+1]).
struct SectionWn {
    int n = 0;
    std::vector<std::uint8_t> letters;
    std::vector<std::uint64_t> offsets{0};
    std::vector<double> log_ratio;  // log r_u per word
    std::size_t inexact_decisions = 0;

    std::size_t size() const { return offsets.size() - 1; }
    std::vector<int> word(std::size_t k) const;
};

// Smallest k >= 1 with |beta|^k >= 2^n, decided exactly.
int homogeneous_depth(const AlgebraicNumber& beta, int n);

// Exact decision r_u <= 2^-n for a word with exact ratios.
bool word_accepted_exact(const WeightedIFS& ifs, const std::vector<int>& word, int n);

SectionWn build_section(const WeightedIFS& ifs, int n, std::size_t budget = 100'000'000,
                        Exec exec = Exec::Parallel);

struct SectionCheck {
    double s = 0;
    double identity_sum = 0;  // sum r_u^s
    bool identity_ok = false;
    bool count_ok = false;  // #W_n >= 2^{ns}
    bool sandwich_ok = false;
};

SectionCheck check_section(const WeightedIFS& ifs, const SectionWn& w, double tol = 1e-9);

enum class Truth { True, False, Unknown };
std::string to_string(Truth t);

struct Status {
    Truth value = Truth::Unknown;
    std::string source;
};

struct SeparationReport {
    Status osc, wsc, awsc, esc, wesc;
    std::vector<std::string> notes;
};

struct ClassifyEvidence {
    // min_n log N_n / (n log|beta|), an upper bound on the growth limit.
    std::optional<double> growth_upper_bound;
    // Depth at which two distinct words were found to give the same map.
    std::optional<int> exact_overlap_depth;
};

// Applies the known criteria and the implication closure
// OSC => WSC => AWSC => WESC, OSC => ESC => WESC. Throws InconsistencyError.
SeparationReport classify(const WeightedIFS& ifs, const ClassifyEvidence& evidence = {});

// For one-dimensional systems with the ESC: AWSC holds iff sum r_i <= 1.
struct RatioSumVerdict {
    Rational sum_exact;
    bool exact = false;
    double sum = 0;
    bool awsc = false;
    bool conditional = true;  // ESC not asserted
    double margin = 0;        // 1 - sum
};

RatioSumVerdict ratio_sum_criterion(const WeightedIFS& ifs);

}  // namespace mfs
