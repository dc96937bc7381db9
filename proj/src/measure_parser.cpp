#include "mmdflow/measure_parser.hpp"

#include "mmdflow/errors.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace mmdflow {

namespace {

struct Arg {
    std::optional<std::string> name;
    std::vector<double> values;
    bool is_list = false;
    std::size_t column = 0;
};

const std::map<std::string, std::string>& distribution_aliases() {
    static const std::map<std::string, std::string> aliases{
        {"gaussian", "gaussian"},   {"normal", "gaussian"},        {"laplace", "laplace"},
        {"uniform", "uniform"},     {"dirac", "dirac"},            {"delta", "dirac"},
        {"discrete", "discrete"},   {"exponential", "exponential"}, {"folded_normal", "folded_normal"},
        {"foldednormal", "folded_normal"}, {"folded_norm", "folded_normal"}, {"mixture", "mixture"},
        {"empirical", "empirical"}, {"grid", "grid"},
    };
    return aliases;
}

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    Measure measure_document() {
        Measure m = sum();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        return m;
    }

    double number_document() {
        const double v = expr();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        return v;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw ConfigError(what + " in '" + std::string(text_) + "'", 1, pos_ + 1);
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool peek(char c) {
        skip_ws();
        return pos_ < text_.size() && text_[pos_] == c;
    }

    bool accept(char c) {
        if (peek(c)) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }

    std::string identifier_at(std::size_t at) const {
        std::size_t end = at;
        while (end < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_'))
            ++end;
        if (end == at || std::isdigit(static_cast<unsigned char>(text_[at]))) return {};
        std::string id(text_.substr(at, end - at));
        for (char& ch : id) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
        return id;
    }

    std::string take_identifier() {
        skip_ws();
        std::string id = identifier_at(pos_);
        if (id.empty()) fail("expected identifier");
        pos_ += id.size();
        return id;
    }

    bool distribution_ahead() {
        skip_ws();
        const std::string id = identifier_at(pos_);
        return !id.empty() && distribution_aliases().count(id) != 0;
    }

    // sum := term ('+' term)*
    Measure sum() {
        std::vector<double> weights;
        std::vector<Measure> parts;
        bool explicit_weight = false;
        do {
            auto [w, m, weighted] = term();
            explicit_weight = explicit_weight || weighted;
            weights.push_back(w);
            parts.push_back(std::move(m));
        } while (accept('+'));
        if (parts.size() == 1 && !explicit_weight) return std::move(parts.front());
        try {
            return Measure::mixture(std::move(weights), std::move(parts));
        } catch (const DomainError& e) {
            fail(e.what());
        }
    }

    // term := [weight '*'] distribution
    std::tuple<double, Measure, bool> term() {
        if (distribution_ahead()) return {1.0, distribution(), false};
        double w = factor();
        while (true) {
            if (accept('*')) {
                if (distribution_ahead()) return {w, distribution(), true};
                w *= factor();
            } else if (accept('/')) {
                w /= factor();
            } else {
                fail("expected '*' followed by a distribution");
            }
        }
    }

    Measure distribution() {
        const std::size_t start = pos_;
        const std::string name = distribution_aliases().at(take_identifier());
        expect('(');
        if (name == "mixture") {
            Measure inner = sum();
            expect(')');
            return inner;
        }
        std::vector<Arg> args;
        if (!peek(')')) {
            do args.push_back(argument());
            while (accept(','));
        }
        expect(')');
        try {
            return build(name, args);
        } catch (const DomainError& e) {
            pos_ = start;
            fail(e.what());
        }
    }

    Arg argument() {
        Arg a;
        skip_ws();
        a.column = pos_ + 1;
        const std::string id = identifier_at(pos_);
        if (!id.empty() && id != "pi" && id != "sqrt") {
            std::size_t look = pos_ + id.size();
            while (look < text_.size() && std::isspace(static_cast<unsigned char>(text_[look]))) ++look;
            if (look < text_.size() && text_[look] == '=') {
                a.name = id;
                pos_ = look + 1;
            }
        }
        if (accept('[')) {
            a.is_list = true;
            if (!peek(']')) {
                do a.values.push_back(expr());
                while (accept(','));
            }
            expect(']');
        } else {
            a.values.push_back(expr());
        }
        return a;
    }

    // Resolves positional and keyword arguments against the parameter list.
    std::vector<const Arg*> bind(const std::string& dist, const std::vector<Arg>& args,
                                 const std::vector<std::vector<std::string>>& params, std::size_t required) {
        std::vector<const Arg*> slots(params.size(), nullptr);
        std::size_t positional = 0;
        for (const Arg& a : args) {
            std::size_t slot = params.size();
            if (a.name) {
                for (std::size_t p = 0; p < params.size() && slot == params.size(); ++p)
                    for (const auto& alias : params[p])
                        if (alias == *a.name) slot = p;
                if (slot == params.size()) {
                    pos_ = a.column - 1;
                    fail("unknown parameter '" + *a.name + "' for " + dist);
                }
            } else {
                slot = positional++;
                if (slot >= params.size()) {
                    pos_ = a.column - 1;
                    fail("too many arguments for " + dist);
                }
            }
            if (slots[slot]) {
                pos_ = a.column - 1;
                fail("parameter '" + params[slot].front() + "' given twice");
            }
            slots[slot] = &a;
        }
        for (std::size_t p = 0; p < required; ++p)
            if (!slots[p]) fail("missing parameter '" + params[p].front() + "' for " + dist);
        return slots;
    }

    double scalar(const Arg* a) {
        if (a->is_list || a->values.size() != 1) {
            pos_ = a->column - 1;
            fail("expected a scalar");
        }
        return a->values.front();
    }

    Measure build(const std::string& name, const std::vector<Arg>& args) {
        if (name == "gaussian") {
            auto s = bind(name, args, {{"mean", "mu", "loc", "m"}, {"std", "sigma", "scale", "sd"}}, 2);
            return Measure::gaussian(scalar(s[0]), scalar(s[1]));
        }
        if (name == "laplace") {
            auto s = bind(name, args, {{"loc", "mean", "mu", "m"}, {"scale", "b"}}, 2);
            return Measure::laplace(scalar(s[0]), scalar(s[1]));
        }
        if (name == "uniform") {
            auto s = bind(name, args, {{"a", "lo", "low"}, {"b", "hi", "high"}}, 2);
            return Measure::uniform(scalar(s[0]), scalar(s[1]));
        }
        if (name == "dirac") {
            auto s = bind(name, args, {{"x", "at", "loc"}}, 1);
            return Measure::dirac(scalar(s[0]));
        }
        if (name == "exponential") {
            auto s = bind(name, args, {{"rate", "lambda"}}, 1);
            return Measure::exponential(scalar(s[0]));
        }
        if (name == "folded_normal") {
            auto s = bind(name, args, {{"mu", "mean", "loc"}, {"sigma", "std", "scale"}}, 1);
            return Measure::folded_normal(scalar(s[0]), s[1] ? scalar(s[1]) : 1.0);
        }
        if (name == "discrete") {
            auto s = bind(name, args, {{"x"}, {"w", "weights"}}, 1);
            std::vector<double> x = s[0]->values;
            std::vector<double> w = s[1] ? s[1]->values : std::vector<double>(x.size(), 1.0 / x.size());
            return Measure::discrete(std::move(x), std::move(w));
        }
        if (name == "empirical") {
            auto s = bind(name, args, {{"x", "samples"}}, 1);
            return Measure::empirical(s[0]->values);
        }
        // grid
        auto s = bind(name, args, {{"g", "values"}}, 1);
        return Measure::grid_quantile(s[0]->values);
    }

    // expr := mul (('+' | '-') mul)*
    double expr() {
        double v = mul();
        while (true) {
            if (accept('+'))
                v += mul();
            else if (accept('-'))
                v -= mul();
            else
                return v;
        }
    }

    double mul() {
        double v = factor();
        while (true) {
            if (accept('*'))
                v *= factor();
            else if (accept('/'))
                v /= factor();
            else
                return v;
        }
    }

    double factor() {
        skip_ws();
        if (accept('-')) return -factor();
        if (accept('+')) return factor();
        if (accept('(')) {
            const double v = expr();
            expect(')');
            return v;
        }
        const std::string id = identifier_at(pos_);
        if (id == "pi") {
            pos_ += 2;
            return std::numbers::pi;
        }
        if (id == "inf") {
            pos_ += 3;
            return kInf;
        }
        if (id == "sqrt") {
            pos_ += 4;
            expect('(');
            const double v = expr();
            expect(')');
            if (v < 0.0) fail("sqrt of negative number");
            return std::sqrt(v);
        }
        if (!id.empty()) fail("unknown identifier '" + id + "'");
        return literal();
    }

    double literal() {
        skip_ws();
        const char* first = text_.data() + pos_;
        const char* last = text_.data() + text_.size();
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr == first) fail("expected a number");
        pos_ += static_cast<std::size_t>(ptr - first);
        return v;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

} // namespace

Measure parse_measure(std::string_view text) { return Parser(text).measure_document(); }

double parse_number(std::string_view text) { return Parser(text).number_document(); }

} // namespace mmdflow
