#include "avgdiff/field.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

namespace avgdiff {

void Domain::validate() const {
    if (dim < 1) throw SpecError("domain dim must be >= 1");
    if (!(radius > 0.0) || !std::isfinite(radius)) throw SpecError("domain radius must be positive");
}

namespace {

double int_pow(double x, int p) {
    double r = 1.0;
    for (int i = 0; i < p; ++i) r *= x;
    return r;
}

int term_degree(const TermSpec& t) {
    int d = 0;
    for (int p : t.powers) d += p;
    return d;
}

// Time factor evaluated from n reduced mod its own period, so that
// f(n+P, x) == f(n, x) holds bit-exactly, not just approximately.
double time_factor_value(const TimeFactorSpec& tf, Index n) {
    switch (tf.kind) {
        case TimeFactorSpec::Kind::Const:
            return 1.0;
        case TimeFactorSpec::Kind::Alternating:
            return (n & 1) ? -1.0 : 1.0;
        case TimeFactorSpec::Kind::Cos: {
            const Index r = n % tf.period;
            return std::cos(2.0 * std::numbers::pi * static_cast<double>(r) /
                            static_cast<double>(tf.period));
        }
        case TimeFactorSpec::Kind::Sin: {
            const Index r = n % tf.period;
            return std::sin(2.0 * std::numbers::pi * static_cast<double>(r) /
                            static_cast<double>(tf.period));
        }
    }
    throw SpecError("unknown time factor kind");
}

void validate_spec(const FieldSpec& spec) {
    Domain{spec.dim, spec.radius}.validate();
    if (static_cast<int>(spec.components.size()) != spec.dim)
        throw SpecError("field spec must declare exactly one component per dimension");
    for (const auto& comp : spec.components) {
        for (const auto& t : comp.terms) {
            if (!std::isfinite(t.coeff)) throw SpecError("term coefficient must be finite");
            if (static_cast<int>(t.powers.size()) != spec.dim)
                throw SpecError("term powers must have one entry per dimension");
            int deg = 0;
            for (int p : t.powers) {
                if (p < 0) throw SpecError("term powers must be nonnegative");
                deg += p;
            }
            if (deg > 3) throw SpecError("term degree must be at most 3");
            if ((t.time.kind == TimeFactorSpec::Kind::Cos ||
                 t.time.kind == TimeFactorSpec::Kind::Sin) &&
                t.time.period <= 0)
                throw SpecError("time factor period must be positive");
        }
    }
}

Index term_period(const TimeFactorSpec& tf) {
    switch (tf.kind) {
        case TimeFactorSpec::Kind::Const: return 1;
        case TimeFactorSpec::Kind::Alternating: return 2;
        case TimeFactorSpec::Kind::Cos:
        case TimeFactorSpec::Kind::Sin: return tf.period;
    }
    throw SpecError("unknown time factor kind");
}

}  // namespace

TimeField field_from_spec(const FieldSpec& spec) {
    validate_spec(spec);
    const double K = spec.radius;

    Index period = 1;
    double bound = 0.0;     // max over components of sum |c| K^deg
    double lipschitz = 0.0; // max over components of sum |c| deg K^(deg-1)
    for (const auto& comp : spec.components) {
        double comp_bound = 0.0;
        double comp_lip = 0.0;
        for (const auto& t : comp.terms) {
            period = std::lcm(period, term_period(t.time));
            const int deg = term_degree(t);
            comp_bound += std::abs(t.coeff) * int_pow(K, deg);
            if (deg > 0) comp_lip += std::abs(t.coeff) * deg * int_pow(K, deg - 1);
        }
        bound = std::max(bound, comp_bound);
        lipschitz = std::max(lipschitz, comp_lip);
    }

    TimeField field;
    field.domain = Domain{spec.dim, spec.radius};
    field.bound = bound;
    field.lipschitz = lipschitz;
    field.period = period;
    field.eval = [spec](Index n, const Vec& x) {
        Vec out(static_cast<std::size_t>(spec.dim), 0.0);
        for (std::size_t c = 0; c < spec.components.size(); ++c) {
            double acc = 0.0;
            for (const auto& t : spec.components[c].terms) {
                double v = t.coeff * time_factor_value(t.time, n);
                for (std::size_t i = 0; i < t.powers.size(); ++i) v *= int_pow(x[i], t.powers[i]);
                acc += v;
            }
            out[c] = acc;
        }
        return out;
    };
    return field;
}

Vec eval_field(const TimeField& field, Index n, const Vec& x) {
    const double norm = sup_norm(x);
    if (norm > field.domain.radius)
        throw DomainError("eval_field: point outside B(K), |x| = " + std::to_string(norm), norm,
                          field.domain.radius);
    return field.eval(n, x);
}

TimeField residual_field(const TimeField& field, const AveragedField& avg) {
    if (field.domain.dim != avg.domain.dim)
        throw SpecError("residual_field: dimension mismatch between field and average");

    TimeField r;
    r.domain = field.domain;
    r.period = field.period;
    if (field.bound && avg.bound) r.bound = *field.bound + *avg.bound;
    if (field.lipschitz && avg.lipschitz) r.lipschitz = *field.lipschitz + *avg.lipschitz;
    r.eval = [f = field.eval, a = avg.eval](Index n, const Vec& x) {
        Vec v = f(n, x);
        const Vec m = a(x);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] -= m[i];
        return v;
    };
    return r;
}

}  // namespace avgdiff
