#include "avgdiff/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>
#include <memory>
#include <sstream>

#include "avgdiff/averaging.hpp"
#include "avgdiff/csv.hpp"
#include "avgdiff/norms.hpp"

namespace avgdiff {

// ---------------------------------------------------------------------------
// Diagnostics
// ---------------------------------------------------------------------------

namespace {

std::string diagnostics_message(const std::vector<ConfigDiagnostic>& diags) {
    std::ostringstream os;
    os << "scenario config rejected:";
    for (const auto& d : diags)
        os << "\n  line " << d.line << ": key '" << d.key << "': " << d.reason;
    return os.str();
}

}  // namespace

ConfigParseError::ConfigParseError(std::vector<ConfigDiagnostic> diags)
    : Error(diagnostics_message(diags)), diags_(std::move(diags)) {}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

namespace {

struct Token {
    enum class Kind { Ident, Number, String, LBrace, RBrace, LBracket, RBracket, Equals, Comma, Semicolon, End };
    Kind kind = Kind::End;
    std::string text;
    double number = 0.0;
    bool is_int = false;
    int line = 0;
};

std::vector<Token> lex(const std::string& text, std::vector<ConfigDiagnostic>& diags) {
    std::vector<Token> tokens;
    int line = 1;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        const char c = text[i];
        if (c == '\n') {
            ++line;
            ++i;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (c == '#') {
            while (i < n && text[i] != '\n') ++i;
            continue;
        }
        auto push = [&](Token::Kind k, std::string t) {
            tokens.push_back({k, std::move(t), 0.0, false, line});
        };
        switch (c) {
            case '{': push(Token::Kind::LBrace, "{"); ++i; continue;
            case '}': push(Token::Kind::RBrace, "}"); ++i; continue;
            case '[': push(Token::Kind::LBracket, "["); ++i; continue;
            case ']': push(Token::Kind::RBracket, "]"); ++i; continue;
            case '=': push(Token::Kind::Equals, "="); ++i; continue;
            case ',': push(Token::Kind::Comma, ","); ++i; continue;
            case ';': push(Token::Kind::Semicolon, ";"); ++i; continue;
            default: break;
        }
        if (c == '"') {
            std::string s;
            ++i;
            bool closed = false;
            while (i < n) {
                if (text[i] == '"') {
                    closed = true;
                    ++i;
                    break;
                }
                if (text[i] == '\n') break;
                if (text[i] == '\\' && i + 1 < n) ++i;
                s += text[i++];
            }
            if (!closed) diags.push_back({line, s, "unterminated string literal"});
            Token t{Token::Kind::String, s, 0.0, false, line};
            tokens.push_back(std::move(t));
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::string s;
            while (i < n && (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_'))
                s += text[i++];
            tokens.push_back({Token::Kind::Ident, std::move(s), 0.0, false, line});
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.') {
            std::string s;
            while (i < n && (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '.' ||
                             text[i] == '-' || text[i] == '+')) {
                // stop '-'/'+' from eating list separators: only accept after e/E
                if ((text[i] == '-' || text[i] == '+') && !s.empty() &&
                    s.back() != 'e' && s.back() != 'E')
                    break;
                s += text[i++];
            }
            char* end = nullptr;
            const double v = std::strtod(s.c_str(), &end);
            if (end == nullptr || *end != '\0') {
                diags.push_back({line, s, "malformed number"});
            }
            const bool is_int = s.find_first_of(".eE") == std::string::npos;
            tokens.push_back({Token::Kind::Number, s, v, is_int, line});
            continue;
        }
        diags.push_back({line, std::string(1, c), "unexpected character"});
        ++i;
    }
    tokens.push_back({Token::Kind::End, "", 0.0, false, line});
    return tokens;
}

// ---------------------------------------------------------------------------
// Generic tree
// ---------------------------------------------------------------------------

struct ConfigValue {
    enum class Kind { Number, String, List };
    Kind kind = Kind::Number;
    double number = 0.0;
    bool is_int = false;
    std::string str;
    std::vector<ConfigValue> list;
    int line = 0;
};

struct ConfigBlock;

struct ConfigEntry {
    std::string key;
    int line = 0;
    std::optional<ConfigValue> value;      // exactly one of value/block is set
    std::unique_ptr<ConfigBlock> block;
};

struct ConfigBlock {
    int line = 0;
    std::vector<ConfigEntry> entries;
};

class TreeParser {
public:
    TreeParser(std::vector<Token> tokens, std::vector<ConfigDiagnostic>& diags)
        : tokens_(std::move(tokens)), diags_(diags) {}

    // document := ident block
    std::pair<std::string, std::unique_ptr<ConfigBlock>> parse_document() {
        const Token& name = peek();
        if (name.kind != Token::Kind::Ident) {
            diags_.push_back({name.line, name.text, "expected a command block name"});
            return {"", nullptr};
        }
        advance();
        auto block = parse_block();
        if (peek().kind != Token::Kind::End)
            diags_.push_back({peek().line, peek().text, "trailing content after the command block"});
        return {name.text, std::move(block)};
    }

private:
    const Token& peek() const { return tokens_[pos_]; }
    void advance() {
        if (pos_ + 1 < tokens_.size()) ++pos_;
    }

    std::unique_ptr<ConfigBlock> parse_block() {
        auto block = std::make_unique<ConfigBlock>();
        block->line = peek().line;
        if (peek().kind != Token::Kind::LBrace) {
            diags_.push_back({peek().line, peek().text, "expected '{'"});
            return block;
        }
        advance();
        while (peek().kind != Token::Kind::RBrace && peek().kind != Token::Kind::End) {
            if (peek().kind == Token::Kind::Semicolon) {
                advance();
                continue;
            }
            if (peek().kind != Token::Kind::Ident) {
                diags_.push_back({peek().line, peek().text, "expected a key"});
                advance();
                continue;
            }
            ConfigEntry entry;
            entry.key = peek().text;
            entry.line = peek().line;
            advance();
            if (peek().kind == Token::Kind::LBrace) {
                entry.block = parse_block();
            } else if (peek().kind == Token::Kind::Equals) {
                advance();
                entry.value = parse_value();
            } else {
                diags_.push_back({peek().line, entry.key, "expected '=' or '{' after key"});
            }
            block->entries.push_back(std::move(entry));
        }
        if (peek().kind == Token::Kind::RBrace) advance();
        else diags_.push_back({peek().line, "", "missing '}'"});
        return block;
    }

    ConfigValue parse_value() {
        ConfigValue v;
        v.line = peek().line;
        switch (peek().kind) {
            case Token::Kind::Number:
                v.kind = ConfigValue::Kind::Number;
                v.number = peek().number;
                v.is_int = peek().is_int;
                advance();
                return v;
            case Token::Kind::String:
                v.kind = ConfigValue::Kind::String;
                v.str = peek().text;
                advance();
                return v;
            case Token::Kind::LBracket: {
                v.kind = ConfigValue::Kind::List;
                advance();
                while (peek().kind != Token::Kind::RBracket && peek().kind != Token::Kind::End) {
                    v.list.push_back(parse_value());
                    if (peek().kind == Token::Kind::Comma) advance();
                }
                if (peek().kind == Token::Kind::RBracket) advance();
                else diags_.push_back({peek().line, "", "missing ']'"});
                return v;
            }
            default:
                diags_.push_back({peek().line, peek().text, "expected a value"});
                advance();
                return v;
        }
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    std::vector<ConfigDiagnostic>& diags_;
};

// ---------------------------------------------------------------------------
// Typed reader with unknown-key detection
// ---------------------------------------------------------------------------

class BlockReader {
public:
    BlockReader(const ConfigBlock& block, std::vector<ConfigDiagnostic>& diags)
        : block_(block), diags_(diags), used_(block.entries.size(), false) {}

    void error(const std::string& key, int line, const std::string& reason) {
        diags_.push_back({line, key, reason});
    }

    int block_line() const { return block_.line; }

    std::optional<double> opt_double(const std::string& key) {
        const ConfigValue* v = find_value(key);
        if (!v) return std::nullopt;
        if (v->kind != ConfigValue::Kind::Number) {
            error(key, v->line, "expected a number");
            return std::nullopt;
        }
        return v->number;
    }

    double require_double(const std::string& key, double fallback = 0.0) {
        auto v = opt_double(key);
        if (!v) {
            report_missing(key);
            return fallback;
        }
        return *v;
    }

    std::optional<Index> opt_int(const std::string& key) {
        const ConfigValue* v = find_value(key);
        if (!v) return std::nullopt;
        if (v->kind != ConfigValue::Kind::Number || !v->is_int) {
            error(key, v->line, "expected an integer");
            return std::nullopt;
        }
        return static_cast<Index>(v->number);
    }

    Index require_int(const std::string& key, Index fallback = 0) {
        auto v = opt_int(key);
        if (!v) {
            report_missing(key);
            return fallback;
        }
        return *v;
    }

    std::optional<std::string> opt_string(const std::string& key) {
        const ConfigValue* v = find_value(key);
        if (!v) return std::nullopt;
        if (v->kind != ConfigValue::Kind::String) {
            error(key, v->line, "expected a string");
            return std::nullopt;
        }
        return v->str;
    }

    std::string require_string(const std::string& key) {
        auto v = opt_string(key);
        if (!v) {
            report_missing(key);
            return "";
        }
        return *v;
    }

    std::optional<std::vector<double>> opt_double_list(const std::string& key) {
        const ConfigValue* v = find_value(key);
        if (!v) return std::nullopt;
        if (v->kind != ConfigValue::Kind::List) {
            error(key, v->line, "expected a list");
            return std::nullopt;
        }
        std::vector<double> out;
        for (const auto& e : v->list) {
            if (e.kind != ConfigValue::Kind::Number) {
                error(key, e.line, "expected a numeric list");
                return std::nullopt;
            }
            out.push_back(e.number);
        }
        return out;
    }

    std::vector<double> require_double_list(const std::string& key) {
        auto v = opt_double_list(key);
        if (!v) {
            report_missing(key);
            return {};
        }
        return *v;
    }

    std::optional<std::vector<Index>> opt_int_list(const std::string& key) {
        const ConfigValue* v = find_value(key);
        if (!v) return std::nullopt;
        if (v->kind != ConfigValue::Kind::List) {
            error(key, v->line, "expected a list");
            return std::nullopt;
        }
        std::vector<Index> out;
        for (const auto& e : v->list) {
            if (e.kind != ConfigValue::Kind::Number || !e.is_int) {
                error(key, e.line, "expected an integer list");
                return std::nullopt;
            }
            out.push_back(static_cast<Index>(e.number));
        }
        return out;
    }

    std::vector<Index> require_int_list(const std::string& key) {
        auto v = opt_int_list(key);
        if (!v) {
            report_missing(key);
            return {};
        }
        return *v;
    }

    const ConfigBlock* opt_block(const std::string& key) {
        for (std::size_t i = 0; i < block_.entries.size(); ++i) {
            if (block_.entries[i].key == key && block_.entries[i].block) {
                if (used_[i]) {
                    error(key, block_.entries[i].line, "duplicate block");
                    return nullptr;
                }
                used_[i] = true;
                return block_.entries[i].block.get();
            }
        }
        return nullptr;
    }

    const ConfigBlock* require_block(const std::string& key) {
        const ConfigBlock* b = opt_block(key);
        if (!b) report_missing(key);
        return b;
    }

    std::vector<const ConfigBlock*> repeated_blocks(const std::string& key) {
        std::vector<const ConfigBlock*> out;
        for (std::size_t i = 0; i < block_.entries.size(); ++i) {
            if (block_.entries[i].key == key && block_.entries[i].block) {
                used_[i] = true;
                out.push_back(block_.entries[i].block.get());
            }
        }
        return out;
    }

    int line_of(const std::string& key) const {
        for (const auto& e : block_.entries)
            if (e.key == key) return e.line;
        return block_.line;
    }

    /// Flags every entry that no reader consumed; strictness lives here.
    void finish() {
        for (std::size_t i = 0; i < block_.entries.size(); ++i) {
            if (!used_[i])
                error(block_.entries[i].key, block_.entries[i].line, "unknown key");
        }
    }

private:
    const ConfigValue* find_value(const std::string& key) {
        const ConfigValue* found = nullptr;
        for (std::size_t i = 0; i < block_.entries.size(); ++i) {
            if (block_.entries[i].key != key || !block_.entries[i].value) continue;
            if (found) {
                error(key, block_.entries[i].line, "duplicate key");
                continue;
            }
            used_[i] = true;
            found = &*block_.entries[i].value;
        }
        return found;
    }

    void report_missing(const std::string& key) { error(key, block_.line, "required key missing"); }

    const ConfigBlock& block_;
    std::vector<ConfigDiagnostic>& diags_;
    std::vector<bool> used_;
};

// ---------------------------------------------------------------------------
// Domain-specific pieces
// ---------------------------------------------------------------------------

std::optional<TimeFactorSpec> parse_time_factor(const std::string& text) {
    if (text == "const") return TimeFactorSpec::constant();
    if (text == "alt") return TimeFactorSpec::alternating();
    const auto colon = text.find(':');
    if (colon != std::string::npos) {
        const std::string kind = text.substr(0, colon);
        char* end = nullptr;
        const long long p = std::strtoll(text.c_str() + colon + 1, &end, 10);
        if (end && *end == '\0' && p > 0) {
            if (kind == "cos") return TimeFactorSpec::cos(p);
            if (kind == "sin") return TimeFactorSpec::sin(p);
        }
    }
    return std::nullopt;
}

std::string time_factor_to_string(const TimeFactorSpec& tf) {
    switch (tf.kind) {
        case TimeFactorSpec::Kind::Const: return "const";
        case TimeFactorSpec::Kind::Alternating: return "alt";
        case TimeFactorSpec::Kind::Cos: return "cos:" + std::to_string(tf.period);
        case TimeFactorSpec::Kind::Sin: return "sin:" + std::to_string(tf.period);
    }
    return "const";
}

std::optional<ScaleMode> parse_scale(const std::string& text) {
    if (text == "unit") return ScaleMode::unit();
    if (text == "one_over_n") return ScaleMode::one_over_n();
    const auto colon = text.find(':');
    if (colon != std::string::npos) {
        const std::string kind = text.substr(0, colon);
        char* end = nullptr;
        const double e = std::strtod(text.c_str() + colon + 1, &end);
        if (end && *end == '\0' && e > 0.0 && (kind == "eps" || kind == "epsilon"))
            return ScaleMode::eps(e);
    }
    return std::nullopt;
}

std::string scale_to_string(const ScaleMode& scale) {
    switch (scale.kind) {
        case ScaleMode::Kind::Unit: return "unit";
        case ScaleMode::Kind::Epsilon: return "eps:" + format_double(scale.epsilon);
        case ScaleMode::Kind::OneOverN: return "one_over_n";
    }
    return "unit";
}

FieldSpec parse_field_block(const ConfigBlock& block, std::vector<ConfigDiagnostic>& diags) {
    BlockReader r(block, diags);
    FieldSpec spec;
    spec.dim = static_cast<int>(r.require_int("dim", 1));
    spec.radius = r.require_double("radius", 1.0);
    if (spec.dim < 1) r.error("dim", r.line_of("dim"), "must be >= 1");
    if (!(spec.radius > 0.0)) r.error("radius", r.line_of("radius"), "must be positive");

    for (const ConfigBlock* comp_block : r.repeated_blocks("component")) {
        BlockReader cr(*comp_block, diags);
        FieldSpecComponent comp;
        for (const ConfigBlock* term_block : cr.repeated_blocks("term")) {
            BlockReader tr(*term_block, diags);
            TermSpec term;
            term.coeff = tr.require_double("coeff");
            auto powers = tr.require_int_list("powers");
            term.powers.assign(powers.begin(), powers.end());
            const std::string tf = tr.require_string("time");
            if (auto parsed = parse_time_factor(tf)) term.time = *parsed;
            else tr.error("time", tr.line_of("time"), "unknown time factor (const|alt|cos:P|sin:P)");
            tr.finish();
            comp.terms.push_back(std::move(term));
        }
        cr.finish();
        spec.components.push_back(std::move(comp));
    }
    r.finish();

    // Full structural validation with the same rules the library enforces.
    try {
        field_from_spec(spec);
    } catch (const SpecError& e) {
        diags.push_back({block.line, "field", e.what()});
    }
    return spec;
}

std::optional<std::vector<int>> parse_var_subset(BlockReader& r, int dim) {
    auto list = r.opt_int_list("var_subset");
    if (!list) return std::nullopt;
    std::vector<int> subset;
    for (Index i : *list) {
        if (i < 1 || i > dim) {
            r.error("var_subset", r.line_of("var_subset"), "indices must lie in 1..dim");
            return std::nullopt;
        }
        subset.push_back(static_cast<int>(i - 1));  // config is 1-based
    }
    return subset;
}

void check_state_dim(BlockReader& r, const std::string& key, const Vec& x, int dim) {
    if (static_cast<int>(x.size()) != dim)
        r.error(key, r.line_of(key), "length must match the field dimension");
}

void check_positive(BlockReader& r, const std::string& key, double v) {
    if (!(v > 0.0)) r.error(key, r.line_of(key), "must be positive");
}

// ---------------------------------------------------------------------------
// Command parsers
// ---------------------------------------------------------------------------

SimulateConfig parse_simulate(BlockReader& r, std::vector<ConfigDiagnostic>& diags) {
    SimulateConfig c;
    if (const ConfigBlock* fb = r.require_block("field")) c.field = parse_field_block(*fb, diags);
    const std::string scale = r.require_string("scale");
    if (auto s = parse_scale(scale)) c.scale = *s;
    else r.error("scale", r.line_of("scale"), "unknown scale (unit|eps:E|one_over_n)");
    c.n0 = r.require_int("n0");
    c.x0 = r.require_double_list("x0");
    c.horizon = r.require_int("horizon", 1);
    check_state_dim(r, "x0", c.x0, c.field.dim);
    check_positive(r, "horizon", static_cast<double>(c.horizon));
    if (c.n0 < 0) r.error("n0", r.line_of("n0"), "must be nonnegative");
    if (c.scale.kind == ScaleMode::Kind::OneOverN && c.n0 < 1)
        r.error("n0", r.line_of("n0"), "one_over_n scale requires n0 >= 1");
    return c;
}

SnormConfig parse_snorm(BlockReader& r, std::vector<ConfigDiagnostic>& diags) {
    SnormConfig c;
    if (const ConfigBlock* fb = r.require_block("field")) c.field = parse_field_block(*fb, diags);
    const std::string variant = r.opt_string("variant").value_or("sum");
    if (variant == "abs") c.absolute = true;
    else if (variant != "sum") r.error("variant", r.line_of("variant"), "must be \"sum\" or \"abs\"");
    c.window = r.require_int("window", 1);
    c.grid_spacing = r.require_double("grid_spacing", 0.25);
    c.probe_limit = r.require_int("probe_limit", 64);
    check_positive(r, "window", static_cast<double>(c.window));
    check_positive(r, "grid_spacing", c.grid_spacing);
    check_positive(r, "probe_limit", static_cast<double>(c.probe_limit));
    if (c.grid_spacing > c.field.radius)
        r.error("grid_spacing", r.line_of("grid_spacing"), "must not exceed the field radius");
    return c;
}

AverageConfig parse_average(BlockReader& r, std::vector<ConfigDiagnostic>& diags) {
    AverageConfig c;
    if (const ConfigBlock* fb = r.require_block("field")) c.field = parse_field_block(*fb, diags);
    c.x = r.require_double_list("x");
    c.tol = r.opt_double("tol").value_or(1e-9);
    c.window = r.opt_int("window");
    c.probes = r.opt_int_list("probes").value_or(std::vector<Index>{});
    check_state_dim(r, "x", c.x, c.field.dim);
    check_positive(r, "tol", c.tol);
    if (c.window && *c.window < 1) r.error("window", r.line_of("window"), "must be positive");
    if (c.window && c.probes.empty())
        r.error("probes", r.block_line(), "uniformity window requires probe starts");
    return c;
}

StabilityConfig parse_stability(BlockReader& r, std::vector<ConfigDiagnostic>& diags) {
    StabilityConfig c;
    if (const ConfigBlock* fb = r.require_block("field")) c.field = parse_field_block(*fb, diags);
    const std::string scale = r.require_string("scale");
    if (auto s = parse_scale(scale)) c.scale = *s;
    else r.error("scale", r.line_of("scale"), "unknown scale (unit|eps:E|one_over_n)");
    c.xi0 = r.require_double_list("xi0");
    c.n0 = r.require_int("n0");
    c.eps_grid = r.require_double_list("eps_grid");
    c.probes = r.opt_int_list("probes").value_or(std::vector<Index>{});
    c.samples_per_shell = static_cast<int>(r.opt_int("samples_per_shell").value_or(8));
    c.horizon = r.opt_int("horizon").value_or(4096);
    c.var_subset = parse_var_subset(r, c.field.dim);
    check_state_dim(r, "xi0", c.xi0, c.field.dim);
    for (double e : c.eps_grid)
        if (!(e > 0.0)) r.error("eps_grid", r.line_of("eps_grid"), "entries must be positive");
    for (std::size_t i = 1; i < c.eps_grid.size(); ++i)
        if (c.eps_grid[i] > c.eps_grid[i - 1])
            r.error("eps_grid", r.line_of("eps_grid"), "must be descending");
    check_positive(r, "horizon", static_cast<double>(c.horizon));
    check_positive(r, "samples_per_shell", static_cast<double>(c.samples_per_shell));
    if (c.n0 < 0) r.error("n0", r.line_of("n0"), "must be nonnegative");
    for (Index p : c.probes)
        if (p < 0) r.error("probes", r.line_of("probes"), "entries must be nonnegative");
    return c;
}

Theorem1Config parse_theorem1(BlockReader& r, std::vector<ConfigDiagnostic>& diags) {
    Theorem1Config c;
    if (const ConfigBlock* fb = r.require_block("x_field")) c.x_field = parse_field_block(*fb, diags);
    if (const ConfigBlock* fb = r.require_block("r_field")) c.r_field = parse_field_block(*fb, diags);
    c.xi0 = r.require_double_list("xi0");
    c.eps = r.require_double("eps", 0.1);
    c.eta1 = r.require_double("eta1", 0.05);
    c.eta2 = r.require_double("eta2", 0.01);
    c.window = r.require_int("window", 1);
    c.probes = r.opt_int_list("probes").value_or(std::vector<Index>{0});
    c.ic_samples = static_cast<int>(r.opt_int("ic_samples").value_or(4));
    c.horizon = r.require_int("horizon", 10000);
    c.snorm_grid_spacing = r.opt_double("snorm_grid_spacing").value_or(0.125);
    c.snorm_probe_limit = r.opt_int("snorm_probe_limit").value_or(64);
    check_state_dim(r, "xi0", c.xi0, c.x_field.dim);
    check_positive(r, "eps", c.eps);
    check_positive(r, "eta1", c.eta1);
    check_positive(r, "eta2", c.eta2);
    check_positive(r, "window", static_cast<double>(c.window));
    check_positive(r, "horizon", static_cast<double>(c.horizon));
    if (c.x_field.dim != c.r_field.dim)
        r.error("r_field", r.line_of("r_field"), "dimension must match x_field");
    for (Index p : c.probes)
        if (p < 0) r.error("probes", r.line_of("probes"), "entries must be nonnegative");
    return c;
}

Theorem2Config parse_theorem2(BlockReader& r, std::vector<ConfigDiagnostic>& diags) {
    Theorem2Config c;
    if (const ConfigBlock* fb = r.require_block("field")) c.field = parse_field_block(*fb, diags);
    c.xi0 = r.require_double_list("xi0");
    c.eps_list = r.require_double_list("eps_list");
    c.alpha = r.require_double("alpha", 0.1);
    c.beta = r.require_double("beta", 0.01);
    c.horizon_constant = r.opt_double("horizon_constant").value_or(10.0);
    c.n0 = r.opt_int("n0").value_or(0);
    c.ic_samples = static_cast<int>(r.opt_int("ic_samples").value_or(0));
    c.var_subset = parse_var_subset(r, c.field.dim);
    c.avg_tol = r.opt_double("avg_tol").value_or(1e-9);
    check_state_dim(r, "xi0", c.xi0, c.field.dim);
    for (double e : c.eps_list)
        if (!(e > 0.0)) r.error("eps_list", r.line_of("eps_list"), "entries must be positive");
    for (std::size_t i = 1; i < c.eps_list.size(); ++i)
        if (c.eps_list[i] > c.eps_list[i - 1])
            r.error("eps_list", r.line_of("eps_list"), "must be descending");
    check_positive(r, "alpha", c.alpha);
    check_positive(r, "beta", c.beta);
    check_positive(r, "horizon_constant", c.horizon_constant);
    check_positive(r, "avg_tol", c.avg_tol);
    if (c.n0 < 0) r.error("n0", r.line_of("n0"), "must be nonnegative");
    return c;
}

Theorem3Config parse_theorem3(BlockReader& r, std::vector<ConfigDiagnostic>& diags) {
    Theorem3Config c;
    if (const ConfigBlock* fb = r.require_block("field")) c.field = parse_field_block(*fb, diags);
    c.xi0 = r.require_double_list("xi0");
    c.n0_list = r.require_int_list("n0_list");
    c.alpha = r.require_double("alpha", 0.1);
    c.beta = r.require_double("beta", 0.01);
    c.horizon = r.require_int("horizon", 10000);
    c.ic_samples = static_cast<int>(r.opt_int("ic_samples").value_or(0));
    c.var_subset = parse_var_subset(r, c.field.dim);
    c.avg_tol = r.opt_double("avg_tol").value_or(1e-9);
    check_state_dim(r, "xi0", c.xi0, c.field.dim);
    for (Index n : c.n0_list)
        if (n < 1) r.error("n0_list", r.line_of("n0_list"), "entries must be >= 1");
    for (std::size_t i = 1; i < c.n0_list.size(); ++i)
        if (c.n0_list[i] < c.n0_list[i - 1])
            r.error("n0_list", r.line_of("n0_list"), "must be ascending");
    check_positive(r, "alpha", c.alpha);
    check_positive(r, "beta", c.beta);
    check_positive(r, "horizon", static_cast<double>(c.horizon));
    return c;
}

GeneticsConfig parse_genetics(BlockReader& r) {
    GeneticsConfig c;
    c.eps = r.require_double("eps", 0.01);
    c.period = r.require_int("period", 1);
    c.alpha_seq = r.require_double_list("alpha");
    c.beta_seq = r.require_double_list("beta");
    c.p0_list = r.require_double_list("p0");
    c.horizon = r.opt_int("horizon").value_or(100000);
    c.delta_target = r.require_double("delta_target", 0.05);
    c.entry_radius = r.opt_double("entry_radius").value_or(0.1);
    c.orbit_tol = r.opt_double("orbit_tol").value_or(1e-12);
    check_positive(r, "eps", c.eps);
    check_positive(r, "period", static_cast<double>(c.period));
    check_positive(r, "delta_target", c.delta_target);
    check_positive(r, "entry_radius", c.entry_radius);
    check_positive(r, "orbit_tol", c.orbit_tol);
    check_positive(r, "horizon", static_cast<double>(c.horizon));
    if (static_cast<Index>(c.alpha_seq.size()) != c.period)
        r.error("alpha", r.line_of("alpha"), "length must equal period");
    if (static_cast<Index>(c.beta_seq.size()) != c.period)
        r.error("beta", r.line_of("beta"), "length must equal period");
    for (double p0 : c.p0_list)
        if (!(p0 > 0.0 && p0 < 1.0))
            r.error("p0", r.line_of("p0"), "starts must lie strictly inside (0,1)");
    if (static_cast<Index>(c.alpha_seq.size()) == c.period &&
        static_cast<Index>(c.beta_seq.size()) == c.period) {
        try {
            SelectionParams::make(c.eps, c.alpha_seq, c.beta_seq);
        } catch (const ParameterError& e) {
            r.error("genetics", r.block_line(), e.what());
        }
    }
    return c;
}

}  // namespace

std::string to_string(ScenarioConfig::Command c) {
    switch (c) {
        case ScenarioConfig::Command::Simulate: return "simulate";
        case ScenarioConfig::Command::Snorm: return "snorm";
        case ScenarioConfig::Command::Average: return "average";
        case ScenarioConfig::Command::Stability: return "stability";
        case ScenarioConfig::Command::Theorem1: return "theorem1";
        case ScenarioConfig::Command::Theorem2: return "theorem2";
        case ScenarioConfig::Command::Theorem3: return "theorem3";
        case ScenarioConfig::Command::Genetics: return "genetics";
    }
    return "simulate";
}

std::optional<ScenarioConfig::Command> command_from_string(const std::string& name) {
    using C = ScenarioConfig::Command;
    if (name == "simulate") return C::Simulate;
    if (name == "snorm") return C::Snorm;
    if (name == "average") return C::Average;
    if (name == "stability") return C::Stability;
    if (name == "theorem1") return C::Theorem1;
    if (name == "theorem2") return C::Theorem2;
    if (name == "theorem3") return C::Theorem3;
    if (name == "genetics") return C::Genetics;
    return std::nullopt;
}

ScenarioConfig parse_scenario(const std::string& text) {
    std::vector<ConfigDiagnostic> diags;
    std::vector<Token> tokens = lex(text, diags);
    TreeParser parser(std::move(tokens), diags);
    auto [name, block] = parser.parse_document();
    if (!block) throw ConfigParseError(std::move(diags));

    ScenarioConfig config;
    const auto command = command_from_string(name);
    if (!command) {
        diags.push_back({block->line, name, "unknown command"});
        throw ConfigParseError(std::move(diags));
    }
    config.command = *command;

    BlockReader r(*block, diags);
    const Index seed = r.opt_int("seed").value_or(0);
    config.seed = static_cast<std::uint64_t>(seed);
    config.out = r.opt_string("out").value_or("");

    switch (config.command) {
        case ScenarioConfig::Command::Simulate: config.payload = parse_simulate(r, diags); break;
        case ScenarioConfig::Command::Snorm: config.payload = parse_snorm(r, diags); break;
        case ScenarioConfig::Command::Average: config.payload = parse_average(r, diags); break;
        case ScenarioConfig::Command::Stability: config.payload = parse_stability(r, diags); break;
        case ScenarioConfig::Command::Theorem1: config.payload = parse_theorem1(r, diags); break;
        case ScenarioConfig::Command::Theorem2: config.payload = parse_theorem2(r, diags); break;
        case ScenarioConfig::Command::Theorem3: config.payload = parse_theorem3(r, diags); break;
        case ScenarioConfig::Command::Genetics: config.payload = parse_genetics(r); break;
    }
    r.finish();
    if (!diags.empty()) throw ConfigParseError(std::move(diags));
    return config;
}

// ---------------------------------------------------------------------------
// Serialization (canonical form; round-trips through parse_scenario)
// ---------------------------------------------------------------------------

namespace {

class Writer {
public:
    void open(const std::string& name) {
        indent();
        os_ << name << " {\n";
        ++depth_;
    }
    void close() {
        --depth_;
        indent();
        os_ << "}\n";
    }
    void kv(const std::string& key, const std::string& value) {
        indent();
        os_ << key << " = " << value << "\n";
    }
    void kv(const std::string& key, double value) { kv(key, format_double(value)); }
    void kv(const std::string& key, Index value) { kv(key, std::to_string(value)); }
    void kv_str(const std::string& key, const std::string& value) { kv(key, '"' + value + '"'); }
    void kv_list(const std::string& key, const std::vector<double>& values) {
        std::string s = "[";
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) s += ", ";
            s += format_double(values[i]);
        }
        kv(key, s + "]");
    }
    void kv_list(const std::string& key, const std::vector<Index>& values) {
        std::string s = "[";
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) s += ", ";
            s += std::to_string(values[i]);
        }
        kv(key, s + "]");
    }
    std::string str() const { return os_.str(); }

private:
    void indent() {
        for (int i = 0; i < depth_; ++i) os_ << "  ";
    }
    std::ostringstream os_;
    int depth_ = 0;
};

void write_field(Writer& w, const std::string& name, const FieldSpec& spec) {
    w.open(name);
    w.kv("dim", static_cast<Index>(spec.dim));
    w.kv("radius", spec.radius);
    for (const auto& comp : spec.components) {
        w.open("component");
        for (const auto& term : comp.terms) {
            w.open("term");
            w.kv("coeff", term.coeff);
            std::vector<Index> powers(term.powers.begin(), term.powers.end());
            w.kv_list("powers", powers);
            w.kv_str("time", time_factor_to_string(term.time));
            w.close();
        }
        w.close();
    }
    w.close();
}

void write_subset(Writer& w, const std::optional<std::vector<int>>& subset) {
    if (!subset) return;
    std::vector<Index> one_based;
    for (int i : *subset) one_based.push_back(static_cast<Index>(i) + 1);
    w.kv_list("var_subset", one_based);
}

}  // namespace

std::string serialize_scenario(const ScenarioConfig& config) {
    Writer w;
    w.open(to_string(config.command));
    w.kv("seed", static_cast<Index>(config.seed));
    if (!config.out.empty()) w.kv_str("out", config.out);

    if (const auto* c = std::get_if<SimulateConfig>(&config.payload)) {
        write_field(w, "field", c->field);
        w.kv_str("scale", scale_to_string(c->scale));
        w.kv("n0", c->n0);
        w.kv_list("x0", c->x0);
        w.kv("horizon", c->horizon);
    } else if (const auto* c = std::get_if<SnormConfig>(&config.payload)) {
        write_field(w, "field", c->field);
        w.kv_str("variant", c->absolute ? "abs" : "sum");
        w.kv("window", c->window);
        w.kv("grid_spacing", c->grid_spacing);
        w.kv("probe_limit", c->probe_limit);
    } else if (const auto* c = std::get_if<AverageConfig>(&config.payload)) {
        write_field(w, "field", c->field);
        w.kv_list("x", c->x);
        w.kv("tol", c->tol);
        if (c->window) w.kv("window", *c->window);
        if (!c->probes.empty()) w.kv_list("probes", c->probes);
    } else if (const auto* c = std::get_if<StabilityConfig>(&config.payload)) {
        write_field(w, "field", c->field);
        w.kv_str("scale", scale_to_string(c->scale));
        w.kv_list("xi0", c->xi0);
        w.kv("n0", c->n0);
        w.kv_list("eps_grid", c->eps_grid);
        if (!c->probes.empty()) w.kv_list("probes", c->probes);
        w.kv("samples_per_shell", static_cast<Index>(c->samples_per_shell));
        w.kv("horizon", c->horizon);
        write_subset(w, c->var_subset);
    } else if (const auto* c = std::get_if<Theorem1Config>(&config.payload)) {
        write_field(w, "x_field", c->x_field);
        write_field(w, "r_field", c->r_field);
        w.kv_list("xi0", c->xi0);
        w.kv("eps", c->eps);
        w.kv("eta1", c->eta1);
        w.kv("eta2", c->eta2);
        w.kv("window", c->window);
        w.kv_list("probes", c->probes);
        w.kv("ic_samples", static_cast<Index>(c->ic_samples));
        w.kv("horizon", c->horizon);
        w.kv("snorm_grid_spacing", c->snorm_grid_spacing);
        w.kv("snorm_probe_limit", c->snorm_probe_limit);
    } else if (const auto* c = std::get_if<Theorem2Config>(&config.payload)) {
        write_field(w, "field", c->field);
        w.kv_list("xi0", c->xi0);
        w.kv_list("eps_list", c->eps_list);
        w.kv("alpha", c->alpha);
        w.kv("beta", c->beta);
        w.kv("horizon_constant", c->horizon_constant);
        w.kv("n0", c->n0);
        w.kv("ic_samples", static_cast<Index>(c->ic_samples));
        write_subset(w, c->var_subset);
        w.kv("avg_tol", c->avg_tol);
    } else if (const auto* c = std::get_if<Theorem3Config>(&config.payload)) {
        write_field(w, "field", c->field);
        w.kv_list("xi0", c->xi0);
        w.kv_list("n0_list", c->n0_list);
        w.kv("alpha", c->alpha);
        w.kv("beta", c->beta);
        w.kv("horizon", c->horizon);
        w.kv("ic_samples", static_cast<Index>(c->ic_samples));
        write_subset(w, c->var_subset);
        w.kv("avg_tol", c->avg_tol);
    } else if (const auto* c = std::get_if<GeneticsConfig>(&config.payload)) {
        w.kv("eps", c->eps);
        w.kv("period", c->period);
        w.kv_list("alpha", c->alpha_seq);
        w.kv_list("beta", c->beta_seq);
        w.kv_list("p0", c->p0_list);
        w.kv("horizon", c->horizon);
        w.kv("delta_target", c->delta_target);
        w.kv("entry_radius", c->entry_radius);
        w.kv("orbit_tol", c->orbit_tol);
    }
    w.close();
    return w.str();
}

// ---------------------------------------------------------------------------
// Execution
// ---------------------------------------------------------------------------

namespace {

std::string flags_to_string(const std::vector<std::string>& flags) {
    std::string s;
    for (std::size_t i = 0; i < flags.size(); ++i) {
        if (i) s += ';';
        s += flags[i];
    }
    return s;
}

int status_of(const std::vector<TheoremReport>& reports) {
    bool violated = false;
    for (const auto& r : reports) {
        if (!r.hypothesis_flags.empty()) return kStatusHypothesis;
        if (!r.conclusion_holds) violated = true;
    }
    return violated ? kStatusViolated : kStatusHolds;
}

std::vector<std::string> trajectory_header(int dim) {
    std::vector<std::string> header{"n"};
    for (int i = 1; i <= dim; ++i) header.push_back("x" + std::to_string(i));
    return header;
}

std::vector<CsvRow> trajectory_rows(const Trajectory& traj) {
    std::vector<CsvRow> rows;
    rows.reserve(traj.states.size());
    for (std::size_t j = 0; j < traj.states.size(); ++j) {
        CsvRow row{traj.time_of(j)};
        for (double v : traj.states[j]) row.emplace_back(v);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<std::string> report_header(const TheoremReport& report) {
    std::vector<std::string> header{"theorem"};
    for (const auto& [k, _] : report.params) header.push_back(k);
    header.insert(header.end(), {"max_deviation", "first_violation", "outcome", "flags"});
    return header;
}

CsvRow report_row(const TheoremReport& report) {
    CsvRow row{to_string(report.theorem)};
    for (const auto& [_, v] : report.params) row.emplace_back(v);
    row.emplace_back(report.max_deviation);
    row.emplace_back(report.first_violation ? std::to_string(*report.first_violation)
                                            : std::string{});
    row.emplace_back(to_string(report.status()));
    row.emplace_back(flags_to_string(report.hypothesis_flags));
    return row;
}

void summarize_reports(std::ostringstream& summary, const std::vector<TheoremReport>& reports) {
    for (const auto& report : reports) {
        summary << to_string(report.theorem);
        for (const auto& [k, v] : report.params) summary << ' ' << k << '=' << format_double(v);
        summary << " max_deviation=" << format_double(report.max_deviation);
        if (report.first_violation) summary << " first_violation=" << *report.first_violation;
        summary << " outcome=" << to_string(report.status());
        if (!report.hypothesis_flags.empty())
            summary << " flags=" << flags_to_string(report.hypothesis_flags);
        summary << '\n';
    }
}

struct CommandOutput {
    std::vector<std::string> header;
    std::vector<CsvRow> rows;
    std::ostringstream summary;
    int status = kStatusHolds;
};

CommandOutput run_simulate(const SimulateConfig& c) {
    CommandOutput out;
    const TimeField field = field_from_spec(c.field);
    const Trajectory traj = iterate(field, c.scale, c.n0, c.x0, c.horizon);
    out.header = trajectory_header(c.field.dim);
    out.rows = trajectory_rows(traj);
    out.summary << "steps: " << traj.steps() << '\n';
    if (traj.exited)
        out.summary << "domain-exit: step " << traj.time_of(*traj.exited) << '\n';
    return out;
}

CommandOutput run_snorm(const SnormConfig& c) {
    CommandOutput out;
    const TimeField field = field_from_spec(c.field);
    const WindowNormReport report =
        c.absolute ? window_abs_norm(field, c.window, c.grid_spacing, c.probe_limit)
                   : window_sum_norm(field, c.window, c.grid_spacing, c.probe_limit);
    out.header = {"variant", "window", "value", "witness_n"};
    for (int i = 1; i <= c.field.dim; ++i) out.header.push_back("witness_x" + std::to_string(i));
    out.header.insert(out.header.end(),
                      {"grid_spacing", "probe_limit", "sup_over_n_exact", "upper_bound"});
    CsvRow row{std::string(c.absolute ? "abs" : "sum"), report.window, report.value,
               report.witness_n};
    for (double v : report.witness_x) row.emplace_back(v);
    row.emplace_back(report.grid_spacing);
    row.emplace_back(report.probe_limit);
    row.emplace_back(std::string(report.sup_over_n_exact ? "yes" : "no"));
    row.emplace_back(report.upper_bound ? format_double(*report.upper_bound) : std::string{});
    out.rows.push_back(std::move(row));
    out.summary << "value: " << format_double(report.value) << '\n'
                << "witness_n: " << report.witness_n << '\n'
                << "sup_over_n_exact: " << (report.sup_over_n_exact ? "yes" : "no") << '\n';
    return out;
}

CommandOutput run_average(const AverageConfig& c) {
    CommandOutput out;
    const TimeField field = field_from_spec(c.field);
    out.header.clear();
    for (int i = 1; i <= c.field.dim; ++i) out.header.push_back("x" + std::to_string(i));
    for (int i = 1; i <= c.field.dim; ++i) out.header.push_back("avg" + std::to_string(i));
    if (c.window) out.header.push_back("uniformity_gap");
    CsvRow row;
    for (double v : c.x) row.emplace_back(v);
    try {
        const Vec mean = estimate_average(field, c.x, c.tol);
        for (double v : mean) row.emplace_back(v);
        if (c.window) {
            AveragedField avg = averaged_field_from(field, c.tol);
            const double gap = uniformity_gap(field, avg, c.x, *c.window, c.probes);
            row.emplace_back(gap);
            out.summary << "uniformity_gap: " << format_double(gap) << '\n';
        }
        out.summary << "average:";
        for (double v : mean) out.summary << ' ' << format_double(v);
        out.summary << '\n';
    } catch (const AveragingDivergenceError& e) {
        for (int i = 0; i < c.field.dim; ++i) row.emplace_back(std::string{});
        if (c.window) row.emplace_back(std::string{});
        out.status = kStatusHypothesis;
        out.summary << "averaging-divergence: " << e.what() << '\n';
    }
    out.rows.push_back(std::move(row));
    return out;
}

CommandOutput run_stability(const StabilityConfig& c, std::uint64_t seed) {
    CommandOutput out;
    const TimeField field = field_from_spec(c.field);
    UasOptions opt;
    opt.eps_grid = c.eps_grid;
    opt.probes = c.probes;
    opt.samples_per_shell = c.samples_per_shell;
    opt.horizon = c.horizon;
    opt.var_subset = c.var_subset;
    opt.seed = seed;
    const StabilityProfile profile = estimate_uas(field, c.scale, c.xi0, c.n0, opt);

    out.header = {"eps", "delta", "T", "status"};
    for (const auto& e : profile.entries) {
        out.rows.push_back(CsvRow{e.eps, e.delta, e.T, std::string("ok")});
        out.summary << "eps=" << format_double(e.eps) << " delta=" << format_double(e.delta)
                    << " T=" << e.T << '\n';
    }
    for (double eps : profile.failed_eps) {
        out.rows.push_back(CsvRow{eps, std::string{}, std::string{}, std::string("failed")});
        out.summary << "eps=" << format_double(eps) << " stability-estimation-failure\n";
    }
    if (!profile.all_succeeded()) out.status = kStatusHypothesis;
    return out;
}

CommandOutput run_theorem1(const Theorem1Config& c, std::uint64_t seed) {
    CommandOutput out;
    const TimeField x_field = field_from_spec(c.x_field);
    const TimeField r_field = field_from_spec(c.r_field);
    TotalStabilityOptions opt;
    opt.eps = c.eps;
    opt.eta1 = c.eta1;
    opt.eta2 = c.eta2;
    opt.window = c.window;
    opt.n0_probes = c.probes;
    opt.ic_samples = c.ic_samples;
    opt.horizon = c.horizon;
    opt.snorm_grid_spacing = c.snorm_grid_spacing;
    opt.snorm_probe_limit = c.snorm_probe_limit;
    opt.seed = seed;
    const TheoremReport report = total_stability_check(x_field, r_field, c.xi0, opt);
    out.header = report_header(report);
    out.rows.push_back(report_row(report));
    summarize_reports(out.summary, {report});
    out.status = status_of({report});
    return out;
}

CommandOutput run_theorem2(const Theorem2Config& c, std::uint64_t seed) {
    CommandOutput out;
    const TimeField field = field_from_spec(c.field);
    AveragingSweepOptions opt;
    opt.eps_list = c.eps_list;
    opt.alpha = c.alpha;
    opt.beta = c.beta;
    opt.horizon_constant = c.horizon_constant;
    opt.n0 = c.n0;
    opt.ic_samples = c.ic_samples;
    opt.var_subset = c.var_subset;
    opt.seed = seed;
    opt.avg_tol = c.avg_tol;
    const auto reports = averaging_closeness_sweep(field, c.xi0, opt);
    out.header = report_header(reports.front());
    for (const auto& r : reports) out.rows.push_back(report_row(r));
    summarize_reports(out.summary, reports);
    out.status = status_of(reports);
    return out;
}

CommandOutput run_theorem3(const Theorem3Config& c, std::uint64_t seed) {
    CommandOutput out;
    const TimeField field = field_from_spec(c.field);
    VanishingSweepOptions opt;
    opt.n0_list = c.n0_list;
    opt.alpha = c.alpha;
    opt.beta = c.beta;
    opt.horizon = c.horizon;
    opt.ic_samples = c.ic_samples;
    opt.var_subset = c.var_subset;
    opt.seed = seed;
    opt.avg_tol = c.avg_tol;
    const auto reports = vanishing_rhs_sweep(field, c.xi0, opt);
    out.header = report_header(reports.front());
    for (const auto& r : reports) out.rows.push_back(report_row(r));
    summarize_reports(out.summary, reports);
    out.status = status_of(reports);
    return out;
}

CommandOutput run_genetics(const GeneticsConfig& c) {
    CommandOutput out;
    const SelectionParams params = SelectionParams::make(c.eps, c.alpha_seq, c.beta_seq);
    SelectionExperimentOptions opt;
    opt.p0_list = c.p0_list;
    opt.delta_target = c.delta_target;
    opt.horizon = c.horizon;
    opt.entry_radius = c.entry_radius;
    opt.orbit_tol = c.orbit_tol;
    const SelectionExperimentResult result = selection_experiment(params, opt);

    const TimeField exact = selection_field(params);
    const Trajectory traj = iterate(exact, ScaleMode::unit(), 0, Vec{c.p0_list.front()}, c.horizon);
    out.header = trajectory_header(1);
    out.rows = trajectory_rows(traj);

    out.summary << "equilibrium: " << format_double(selection_equilibrium(params)) << '\n';
    out.summary << "orbit:";
    for (const Vec& s : result.orbit.states) out.summary << ' ' << format_double(s[0]);
    out.summary << '\n';
    out.summary << "orbit_residual: " << format_double(result.orbit.residual) << '\n';
    out.summary << "multipliers:";
    for (double m : result.orbit.multipliers) out.summary << ' ' << format_double(m);
    out.summary << '\n';
    out.summary << "stable: " << (result.stable ? "yes" : "no") << '\n';
    if (result.newton_fallback) out.summary << "orbit-newton-fallback\n";
    for (const auto& run : result.runs)
        out.summary << "p0=" << format_double(run.p0)
                    << " dev_averaged=" << format_double(run.dev_averaged)
                    << " dev_orbit=" << format_double(run.dev_orbit) << '\n';
    summarize_reports(out.summary, {result.report});
    out.status = status_of({result.report});
    return out;
}

}  // namespace

int run_scenario(const ScenarioConfig& config) {
    const std::string prefix = config.out.empty() ? to_string(config.command) : config.out;
    CommandOutput out;
    try {
        switch (config.command) {
            case ScenarioConfig::Command::Simulate:
                out = run_simulate(std::get<SimulateConfig>(config.payload));
                break;
            case ScenarioConfig::Command::Snorm:
                out = run_snorm(std::get<SnormConfig>(config.payload));
                break;
            case ScenarioConfig::Command::Average:
                out = run_average(std::get<AverageConfig>(config.payload));
                break;
            case ScenarioConfig::Command::Stability:
                out = run_stability(std::get<StabilityConfig>(config.payload), config.seed);
                break;
            case ScenarioConfig::Command::Theorem1:
                out = run_theorem1(std::get<Theorem1Config>(config.payload), config.seed);
                break;
            case ScenarioConfig::Command::Theorem2:
                out = run_theorem2(std::get<Theorem2Config>(config.payload), config.seed);
                break;
            case ScenarioConfig::Command::Theorem3:
                out = run_theorem3(std::get<Theorem3Config>(config.payload), config.seed);
                break;
            case ScenarioConfig::Command::Genetics:
                out = run_genetics(std::get<GeneticsConfig>(config.payload));
                break;
        }
    } catch (const IoError&) {
        return kStatusIoError;
    } catch (const Error& e) {
        // Validation-style failures surface as status 2 with a summary note.
        std::ostringstream summary;
        summary << "command: " << to_string(config.command) << '\n'
                << "error: " << e.what() << '\n'
                << "status: " << kStatusHypothesis << '\n';
        try {
            write_text(summary.str(), prefix + ".summary.txt");
        } catch (const IoError&) {
            return kStatusIoError;
        }
        return kStatusHypothesis;
    }

    std::ostringstream summary;
    summary << "command: " << to_string(config.command) << '\n'
            << "seed: " << config.seed << '\n'
            << out.summary.str() << "status: " << out.status << '\n';
    try {
        write_csv(out.header, out.rows, prefix + ".csv");
        write_text(summary.str(), prefix + ".summary.txt");
    } catch (const IoError&) {
        return kStatusIoError;
    }
    return out.status;
}

}  // namespace avgdiff
