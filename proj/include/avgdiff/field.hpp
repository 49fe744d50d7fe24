#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "avgdiff/errors.hpp"
#include "avgdiff/vec.hpp"

namespace avgdiff {

/// Closed ball B(K) in R^m under the sup norm. Every field lives on
/// G = {nonnegative integers} x B(K).
struct Domain {
    int dim = 1;          // m
    double radius = 1.0;  // K

    bool contains(const Vec& x) const { return sup_norm(x) <= radius; }
    void validate() const;
};

/// Time-indexed vector field f(n, x) with optional declared metadata.
///
/// Evaluation must be pure: fields are shared freely across threads.
/// `bound`, `lipschitz` and `period` are declarations, not measurements;
/// spot-check helpers live in the tests.
struct TimeField {
    using EvalFn = std::function<Vec(Index n, const Vec& x)>;

    Domain domain;
    EvalFn eval;
    std::optional<double> bound;                                // M1
    std::optional<double> lipschitz;                            // L
    std::optional<Index> period;                                // smallest P with f(n+P,x)=f(n,x)
    std::optional<std::function<double(double)>> continuity_modulus;  // omega(delta)

    Vec operator()(Index n, const Vec& x) const { return eval(n, x); }
};

/// Time-independent field, typically a Cesaro average of a TimeField.
struct AveragedField {
    using EvalFn = std::function<Vec(const Vec& x)>;

    Domain domain;
    EvalFn eval;
    std::optional<double> bound;      // M2
    std::optional<double> lipschitz;  // L

    Vec operator()(const Vec& x) const { return eval(x); }
};

// ---------------------------------------------------------------------------
// Spec-defined closed-form fields
//
// Per component, a sum of terms  coeff * tf(n) * prod_i x_i^powers[i]
// with tf one of 1, (-1)^n, cos(2*pi*n/P), sin(2*pi*n/P) and total
// monomial degree at most 3.
// ---------------------------------------------------------------------------

struct TimeFactorSpec {
    enum class Kind { Const, Alternating, Cos, Sin };
    Kind kind = Kind::Const;
    Index period = 1;  // used by Cos/Sin only

    static TimeFactorSpec constant() { return {Kind::Const, 1}; }
    static TimeFactorSpec alternating() { return {Kind::Alternating, 2}; }
    static TimeFactorSpec cos(Index p) { return {Kind::Cos, p}; }
    static TimeFactorSpec sin(Index p) { return {Kind::Sin, p}; }

    bool operator==(const TimeFactorSpec&) const = default;
};

struct TermSpec {
    double coeff = 0.0;
    std::vector<int> powers;  // one exponent per coordinate, sum <= 3
    TimeFactorSpec time;

    bool operator==(const TermSpec&) const = default;
};

struct FieldSpecComponent {
    std::vector<TermSpec> terms;

    bool operator==(const FieldSpecComponent&) const = default;
};

struct FieldSpec {
    int dim = 1;
    double radius = 1.0;
    std::vector<FieldSpecComponent> components;  // one per output coordinate

    bool operator==(const FieldSpec&) const = default;
};

/// Builds an exactly evaluable TimeField from a closed-form description.
/// Sets `period` to the lcm of the term periods and conservative analytic
/// `bound` / `lipschitz` values over B(K). Throws SpecError on a bad spec.
TimeField field_from_spec(const FieldSpec& spec);

/// Checked evaluation of f(n, x); throws DomainError when x leaves B(K).
Vec eval_field(const TimeField& field, Index n, const Vec& x);

/// R(n, x) = field(n, x) - avg(x). Inherits the period; bound is M1 + M2
/// when both are declared, likewise for the Lipschitz constant.
TimeField residual_field(const TimeField& field, const AveragedField& avg);

}  // namespace avgdiff
