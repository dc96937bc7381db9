#include "mmdflow/run_spec.hpp"

#include "mmdflow/csv.hpp"
#include "mmdflow/errors.hpp"
#include "mmdflow/measure_parser.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace mmdflow {

namespace {

struct Value {
    enum class Kind { String, Raw, Array } kind = Kind::Raw;
    std::string text;
    std::vector<Value> items;
    std::size_t line = 0;
    std::size_t column = 0;
};

struct Entry {
    std::string section;
    std::string key;
    std::size_t line;
    std::size_t column;
    Value value;
};

class Lexer {
public:
    Lexer(std::string_view line, std::size_t line_no) : s_(line), line_(line_no) {}

    bool done() {
        skip_ws();
        return pos_ >= s_.size() || s_[pos_] == '#';
    }
    std::size_t column() const { return pos_ + 1; }
    char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }

    [[noreturn]] void fail(const std::string& what) const { throw ConfigError(what, line_, column()); }

    std::string section() {
        ++pos_; // '['
        skip_ws();
        const std::string name = identifier("section name");
        skip_ws();
        if (peek() != ']') fail("expected ']' after section name");
        ++pos_;
        if (!done()) fail("unexpected text after section header");
        return name;
    }

    std::string identifier(const char* what) {
        const std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_' || s_[pos_] == '-'))
            ++pos_;
        if (pos_ == start) fail(std::string("expected ") + what);
        return std::string(s_.substr(start, pos_ - start));
    }

    void expect(char c) {
        skip_ws();
        if (peek() != c) fail(std::string("expected '") + c + "'");
        ++pos_;
        skip_ws();
    }

    Value value() {
        skip_ws();
        Value v;
        v.line = line_;
        v.column = column();
        const char c = peek();
        if (c == '"' || c == '\'') {
            v.kind = Value::Kind::String;
            v.text = quoted(c);
        } else if (c == '[') {
            v.kind = Value::Kind::Array;
            ++pos_;
            skip_ws();
            if (peek() == ']') {
                ++pos_;
                return v;
            }
            for (;;) {
                v.items.push_back(element());
                skip_ws();
                if (peek() == ',') {
                    ++pos_;
                    skip_ws();
                    if (peek() == ']') {
                        ++pos_;
                        break;
                    }
                    continue;
                }
                if (peek() == ']') {
                    ++pos_;
                    break;
                }
                fail("expected ',' or ']' in array");
            }
        } else {
            v.kind = Value::Kind::Raw;
            v.text = raw(false);
            if (v.text.empty()) fail("expected a value");
        }
        return v;
    }

private:
    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    std::string quoted(char q) {
        ++pos_;
        std::string out;
        while (pos_ < s_.size() && s_[pos_] != q) {
            if (s_[pos_] == '\\' && pos_ + 1 < s_.size()) ++pos_;
            out += s_[pos_++];
        }
        if (pos_ >= s_.size()) fail("unterminated string");
        ++pos_;
        return out;
    }

    // Bare token: ends at whitespace outside parentheses, or at ',' / ']'
    // inside an array.
    std::string raw(bool in_array) {
        const std::size_t start = pos_;
        int depth = 0;
        while (pos_ < s_.size()) {
            const char c = s_[pos_];
            if (c == '(') ++depth;
            if (c == ')') --depth;
            if (depth == 0 && (std::isspace(static_cast<unsigned char>(c)) || c == '#')) break;
            if (depth == 0 && in_array && (c == ',' || c == ']')) break;
            ++pos_;
        }
        if (depth != 0) fail("unbalanced parentheses");
        return std::string(s_.substr(start, pos_ - start));
    }

    Value element() {
        Value v;
        v.line = line_;
        v.column = column();
        const char c = peek();
        if (c == '"' || c == '\'') {
            v.kind = Value::Kind::String;
            v.text = quoted(c);
        } else {
            v.text = raw(true);
            if (v.text.empty()) fail("expected an array element");
        }
        return v;
    }

    std::string_view s_;
    std::size_t line_;
    std::size_t pos_ = 0;
};

std::vector<Entry> tokenize(std::string_view text) {
    std::vector<Entry> entries;
    std::string section;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t end = std::min(text.find('\n', start), text.size());
        std::string_view line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        ++line_no;
        Lexer lex(line, line_no);
        while (!lex.done()) {
            if (lex.peek() == '[') {
                section = lex.section();
                if (section != "mu0" && section != "nu" && section != "solver" && section != "output")
                    throw ConfigError("unknown section [" + section + "] (mu0, nu, solver, output)", line_no, 1);
                break;
            }
            const std::size_t col = lex.column();
            std::string key = lex.identifier("a key");
            lex.expect('=');
            Value v = lex.value();
            entries.push_back({section, std::move(key), line_no, col, std::move(v)});
        }
        if (end == text.size()) break;
        start = end + 1;
    }
    return entries;
}

[[noreturn]] void bad(const Value& v, const std::string& what) { throw ConfigError(what, v.line, v.column); }

double number(const Value& v) {
    if (v.kind == Value::Kind::Array) bad(v, "expected a number, got an array");
    try {
        return parse_number(v.text);
    } catch (const ConfigError& e) {
        bad(v, e.reason());
    }
}

std::size_t count(const Value& v) {
    const double x = number(v);
    if (!(x >= 0.0) || x != std::floor(x) || x > 1e15) bad(v, "expected a nonnegative integer");
    return static_cast<std::size_t>(x);
}

std::string text(const Value& v) {
    if (v.kind == Value::Kind::Array) bad(v, "expected a string, got an array");
    return v.text;
}

std::vector<Value> array(const Value& v) {
    if (v.kind != Value::Kind::Array) return {v};
    return v.items;
}

Measure measure(const Value& v, const std::string& expr) {
    try {
        return parse_measure(expr);
    } catch (const ConfigError& e) {
        // Point into the document: the expression starts after the opening quote.
        const std::size_t offset = v.kind == Value::Kind::String ? 1 : 0;
        throw ConfigError(e.reason(), v.line, v.column + offset + (e.column() > 0 ? e.column() - 1 : 0));
    } catch (const DomainError& e) {
        bad(v, e.what());
    }
}

bool parse_bool(const Value& v) {
    const std::string t = text(v);
    if (t == "true") return true;
    if (t == "false") return false;
    bad(v, "expected true or false");
}

} // namespace

SolverConfig RunSpec::resolved_solver() const {
    SolverConfig cfg = solver;
    cfg.snapshot_steps = snapshot_steps;
    const std::size_t steps = cfg.step_count();
    for (double t : snapshot_times) {
        const double q = t / cfg.tau;
        const double r = std::round(q);
        if (std::abs(q - r) > 1e-9 * std::max(1.0, q))
            throw ConfigError("snapshot time " + csv::number(t) + " is not a multiple of tau");
        cfg.snapshot_steps.push_back(static_cast<std::size_t>(r));
    }
    std::sort(cfg.snapshot_steps.begin(), cfg.snapshot_steps.end());
    cfg.snapshot_steps.erase(std::unique(cfg.snapshot_steps.begin(), cfg.snapshot_steps.end()),
                             cfg.snapshot_steps.end());
    if (snapshot_stride)
        cfg.snapshot_stride = *snapshot_stride;
    else
        cfg.snapshot_stride = cfg.snapshot_steps.empty() ? std::max<std::size_t>(1, steps / 10) : 0;
    return cfg;
}

void RunSpec::validate() const {
    for (double t : snapshot_times)
        if (!(t >= 0.0) || t > solver.t_end * (1.0 + 1e-12))
            throw ConfigError("snapshot time " + csv::number(t) + " is outside [0, t_end]");
    resolved_solver().validate();
    if (solver.scheme == Scheme::ExplicitEuler && nu.has_atoms())
        throw AtomicTargetError("scheme \"explicit\" needs a target without atoms, got " + nu_expr);
    if (solver.scheme == Scheme::ClosedFormDiscrete && !std::holds_alternative<Measure::Discrete>(nu.data()))
        throw NotDiscreteTarget("scheme \"closed-form\" needs a discrete target, got " + nu_expr);
}

RunSpec parse_run_spec(std::string_view doc) {
    RunSpec spec;
    const auto entries = tokenize(doc);

    std::map<std::string, std::vector<const Entry*>> measure_fields; // [mu0] / [nu] key-value form
    const Entry* mu0 = nullptr;
    const Entry* nu = nullptr;
    std::map<std::string, const Entry*> seen;

    for (const Entry& e : entries) {
        const std::string id = e.section + "." + e.key;
        if (seen.count(id)) throw ConfigError("duplicate key '" + e.key + "'", e.line, e.column);
        seen[id] = &e;
        const Value& v = e.value;
        const std::string& k = e.key;

        if (e.section == "mu0" || e.section == "nu") {
            if (k == "measure" || k == "expr") {
                (e.section == "mu0" ? mu0 : nu) = &e;
            } else {
                measure_fields[e.section].push_back(&e);
            }
            continue;
        }
        const bool top = e.section.empty();
        if (top && k == "mu0") {
            mu0 = &e;
        } else if (top && k == "nu") {
            nu = &e;
        } else if ((top || e.section == "solver") && k == "scheme") {
            spec.solver.scheme = [&] {
                try {
                    return parse_scheme(text(v));
                } catch (const ConfigError& err) {
                    bad(v, err.reason());
                }
            }();
        } else if ((top || e.section == "solver") && k == "tau") {
            spec.solver.tau = number(v);
        } else if ((top || e.section == "solver") && k == "n") {
            spec.solver.n = count(v);
        } else if ((top || e.section == "solver") && (k == "t_end" || k == "t-end")) {
            spec.solver.t_end = number(v);
        } else if ((top || e.section == "solver") && k == "bisect_atol") {
            spec.solver.bisect_atol = number(v);
        } else if ((top || e.section == "solver") && (k == "explicit_monotonicity_policy" || k == "policy")) {
            try {
                spec.solver.explicit_monotonicity_policy = parse_policy(text(v));
            } catch (const ConfigError& err) {
                bad(v, err.reason());
            }
        } else if ((top || e.section != "mu0") && (k == "snapshots" || k == "snapshot_steps")) {
            for (const Value& item : array(v)) spec.snapshot_steps.push_back(count(item));
        } else if ((top || e.section != "mu0") && k == "snapshot_times") {
            for (const Value& item : array(v)) spec.snapshot_times.push_back(number(item));
        } else if ((top || e.section != "mu0") && k == "snapshot_stride") {
            spec.snapshot_stride = count(v);
        } else if ((top || e.section == "output") && k == "outdir") {
            spec.outdir = text(v);
        } else if ((top || e.section == "output") && k == "emit") {
            spec.emit = EmitSet{false, false, false, false, false};
            for (const Value& item : array(v)) {
                const std::string name = text(item);
                if (name == "quantiles")
                    spec.emit.quantiles = true;
                else if (name == "densities")
                    spec.emit.densities = true;
                else if (name == "diagnostics")
                    spec.emit.diagnostics = true;
                else if (name == "checks")
                    spec.emit.checks = true;
                else if (name == "svg")
                    spec.emit.svg = true;
                else
                    bad(item, "unknown output '" + name + "' (quantiles, densities, diagnostics, checks, svg)");
            }
        } else if (e.section == "output" && k == "svg") {
            spec.emit.svg = parse_bool(v);
        } else {
            throw ConfigError("unknown key '" + k + "'" + (top ? "" : " in [" + e.section + "]"), e.line, e.column);
        }
    }

    auto resolve = [&](const std::string& name, const Entry* direct, std::string& expr) -> const Value* {
        const auto& fields = measure_fields[name];
        if (direct && !fields.empty())
            throw ConfigError("[" + name + "] mixes 'measure' with distribution fields", fields.front()->line,
                              fields.front()->column);
        if (direct) {
            expr = text(direct->value);
            return &direct->value;
        }
        if (fields.empty()) return nullptr;
        const Entry* kind = nullptr;
        std::string args;
        for (const Entry* f : fields) {
            if (f->key == "kind" || f->key == "type") {
                kind = f;
                continue;
            }
            if (!args.empty()) args += ", ";
            args += f->key + "=";
            if (f->value.kind == Value::Kind::Array) {
                args += "[";
                for (std::size_t i = 0; i < f->value.items.size(); ++i)
                    args += (i ? ", " : "") + f->value.items[i].text;
                args += "]";
            } else {
                args += f->value.text;
            }
        }
        if (!kind) throw ConfigError("[" + name + "] needs 'measure' or 'kind'", fields.front()->line, 1);
        expr = text(kind->value) + "(" + args + ")";
        return &kind->value;
    };

    const Value* mu0_pos = resolve("mu0", mu0, spec.mu0_expr);
    const Value* nu_pos = resolve("nu", nu, spec.nu_expr);
    if (!mu0_pos || !nu_pos) {
        std::string missing;
        if (!mu0_pos) missing += "mu0";
        if (!nu_pos) missing += std::string(missing.empty() ? "" : ", ") + "nu";
        const std::size_t line = entries.empty() ? 1 : entries.back().line;
        throw ConfigError("missing required keys: " + missing + " (required: mu0, nu)", line, 1);
    }
    // Field form: errors refer to the 'kind' line since the expression is synthesized.
    spec.mu0 = mu0 ? measure(*mu0_pos, spec.mu0_expr) : measure(Value{Value::Kind::Raw, "", {}, mu0_pos->line, 1}, spec.mu0_expr);
    spec.nu = nu ? measure(*nu_pos, spec.nu_expr) : measure(Value{Value::Kind::Raw, "", {}, nu_pos->line, 1}, spec.nu_expr);
    spec.validate();
    return spec;
}

RunSpec load_run_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_run_spec(ss.str());
}

std::string to_toml(const RunSpec& spec) {
    std::ostringstream out;
    auto list = [](const auto& xs, auto fmt) {
        std::string s = "[";
        for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? ", " : "") + fmt(xs[i]);
        return s + "]";
    };
    out << "[mu0]\nmeasure = \"" << spec.mu0_expr << "\"\n\n";
    out << "[nu]\nmeasure = \"" << spec.nu_expr << "\"\n\n";
    out << "[solver]\n";
    out << "scheme = \"" << to_string(spec.solver.scheme) << "\"\n";
    out << "tau = " << csv::number(spec.solver.tau) << "\n";
    out << "n = " << spec.solver.n << "\n";
    out << "t_end = " << csv::number(spec.solver.t_end) << "\n";
    out << "bisect_atol = " << csv::number(spec.solver.bisect_atol) << "\n";
    out << "explicit_monotonicity_policy = \"" << to_string(spec.solver.explicit_monotonicity_policy) << "\"\n\n";
    out << "[output]\n";
    out << "outdir = \"" << spec.outdir.generic_string() << "\"\n";
    if (!spec.snapshot_steps.empty())
        out << "snapshots = " << list(spec.snapshot_steps, [](std::size_t k) { return std::to_string(k); }) << "\n";
    if (!spec.snapshot_times.empty())
        out << "snapshot_times = " << list(spec.snapshot_times, [](double t) { return csv::number(t); }) << "\n";
    if (spec.snapshot_stride) out << "snapshot_stride = " << *spec.snapshot_stride << "\n";
    std::vector<std::string> emit;
    if (spec.emit.quantiles) emit.push_back("quantiles");
    if (spec.emit.densities) emit.push_back("densities");
    if (spec.emit.diagnostics) emit.push_back("diagnostics");
    if (spec.emit.checks) emit.push_back("checks");
    if (spec.emit.svg) emit.push_back("svg");
    out << "emit = " << list(emit, [](const std::string& s) { return "\"" + s + "\""; }) << "\n";
    return out.str();
}

} // namespace mmdflow
