#include "factorarg/bif.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>

namespace factorarg {

ParseError::ParseError(const std::string& msg, std::size_t line, std::size_t column)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) +
                         ": " + msg),
      line_(line), column_(column) {}

namespace {

constexpr double kRowTolerance = 1e-4;

struct Token {
    enum Kind { Word, Punct, String, End } kind;
    std::string text;
    std::size_t line;
    std::size_t column;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next() {
        skip_space();
        const std::size_t l = line_, c = col_;
        if (pos_ >= src_.size()) return {Token::End, "", l, c};
        const char ch = src_[pos_];
        if (ch == '"') {
            advance();
            std::string s;
            while (pos_ < src_.size() && src_[pos_] != '"') s += advance();
            if (pos_ >= src_.size()) throw ParseError("unterminated string", l, c);
            advance();
            return {Token::String, s, l, c};
        }
        if (std::string_view("{}()[];,|=").find(ch) != std::string_view::npos) {
            advance();
            return {Token::Punct, std::string(1, ch), l, c};
        }
        std::string w;
        while (pos_ < src_.size() && is_word_char(src_[pos_])) w += advance();
        if (w.empty()) throw ParseError(std::string("unexpected character '") + ch + "'", l, c);
        return {Token::Word, w, l, c};
    }

private:
    static bool is_word_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' ||
               c == '+' || c == '%' || c == '/' || c == '\'';
    }

    char advance() {
        char c = src_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    void skip_space() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
            } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '*') {
                advance();
                advance();
                while (pos_ + 1 < src_.size() && !(src_[pos_] == '*' && src_[pos_ + 1] == '/'))
                    advance();
                if (pos_ + 1 >= src_.size()) throw ParseError("unterminated comment", line_, col_);
                advance();
                advance();
            } else {
                break;
            }
        }
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t col_ = 1;
};

struct RawVariable {
    std::string name;
    std::vector<std::string> states;
    Token at;
};

struct RawProbability {
    std::string child;
    std::vector<std::string> parents;
    std::optional<std::vector<double>> table;
    std::optional<std::vector<double>> default_row;
    std::vector<std::pair<std::vector<std::string>, std::vector<double>>> rows;
    Token at;
};

class Parser {
public:
    explicit Parser(std::string_view text) : lex_(text) { shift(); }

    DiscreteNetwork run() {
        std::string net_name = "unknown";
        while (cur_.kind != Token::End) {
            Token kw = expect_word();
            if (kw.text == "network") {
                net_name = expect_name().text;
                skip_block();
            } else if (kw.text == "variable") {
                parse_variable(kw);
            } else if (kw.text == "probability") {
                parse_probability(kw);
            } else {
                throw ParseError("unexpected '" + kw.text + "'", kw.line, kw.column);
            }
        }
        return assemble(std::move(net_name));
    }

private:
    void shift() { cur_ = lex_.next(); }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg + (cur_.kind == Token::End ? " at end of input" : " near '" + cur_.text + "'"),
                         cur_.line, cur_.column);
    }

    bool at_punct(char c) const { return cur_.kind == Token::Punct && cur_.text[0] == c; }

    void expect_punct(char c) {
        if (!at_punct(c)) fail(std::string("expected '") + c + "'");
        shift();
    }

    Token expect_word() {
        if (cur_.kind != Token::Word) fail("expected a keyword or identifier");
        Token t = cur_;
        shift();
        return t;
    }

    Token expect_name() {
        if (cur_.kind != Token::Word && cur_.kind != Token::String) fail("expected a name");
        Token t = cur_;
        shift();
        return t;
    }

    double expect_number() {
        if (cur_.kind != Token::Word) fail("expected a number");
        double v = 0.0;
        const auto& s = cur_.text;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || p != s.data() + s.size()) fail("malformed number");
        shift();
        return v;
    }

    // Skips a balanced { ... } block; used for `network` properties.
    void skip_block() {
        expect_punct('{');
        int depth = 1;
        while (depth > 0) {
            if (cur_.kind == Token::End) fail("unbalanced braces");
            if (at_punct('{')) ++depth;
            if (at_punct('}')) --depth;
            shift();
        }
    }

    void skip_statement() {
        while (!at_punct(';')) {
            if (cur_.kind == Token::End || at_punct('}')) fail("expected ';'");
            shift();
        }
        shift();
    }

    void parse_variable(const Token& kw) {
        RawVariable v;
        v.at = kw;
        v.name = expect_name().text;
        expect_punct('{');
        bool typed = false;
        while (!at_punct('}')) {
            Token t = expect_word();
            if (t.text == "type") {
                Token kind = expect_word();
                if (kind.text != "discrete")
                    throw ParseError("only discrete variables are supported", kind.line, kind.column);
                expect_punct('[');
                const double declared = expect_number();
                expect_punct(']');
                expect_punct('{');
                while (true) {
                    v.states.push_back(expect_name().text);
                    if (at_punct(',')) {
                        shift();
                        continue;
                    }
                    break;
                }
                expect_punct('}');
                expect_punct(';');
                if (static_cast<double>(v.states.size()) != declared)
                    throw ParseError("variable '" + v.name + "' declares " +
                                         std::to_string(static_cast<long>(declared)) + " states but lists " +
                                         std::to_string(v.states.size()),
                                     t.line, t.column);
                typed = true;
            } else if (t.text == "property") {
                skip_statement();
            } else {
                throw ParseError("unexpected '" + t.text + "' in variable block", t.line, t.column);
            }
        }
        expect_punct('}');
        if (!typed) throw ParseError("variable '" + v.name + "' has no type", kw.line, kw.column);
        variables_.push_back(std::move(v));
    }

    std::vector<double> number_list() {
        std::vector<double> out;
        while (true) {
            out.push_back(expect_number());
            if (at_punct(',')) {
                shift();
                continue;
            }
            break;
        }
        expect_punct(';');
        return out;
    }

    void parse_probability(const Token& kw) {
        RawProbability p;
        p.at = kw;
        expect_punct('(');
        p.child = expect_name().text;
        if (at_punct('|')) {
            shift();
            while (true) {
                p.parents.push_back(expect_name().text);
                if (at_punct(',')) {
                    shift();
                    continue;
                }
                break;
            }
        }
        expect_punct(')');
        expect_punct('{');
        while (!at_punct('}')) {
            if (at_punct('(')) {
                shift();
                std::vector<std::string> labels;
                while (true) {
                    labels.push_back(expect_name().text);
                    if (at_punct(',')) {
                        shift();
                        continue;
                    }
                    break;
                }
                expect_punct(')');
                p.rows.emplace_back(std::move(labels), number_list());
                continue;
            }
            Token t = expect_word();
            if (t.text == "table") {
                p.table = number_list();
            } else if (t.text == "default") {
                p.default_row = number_list();
            } else if (t.text == "property") {
                skip_statement();
            } else {
                throw ParseError("unexpected '" + t.text + "' in probability block", t.line, t.column);
            }
        }
        expect_punct('}');
        probabilities_.push_back(std::move(p));
    }

    DiscreteNetwork assemble(std::string name) {
        std::vector<Variable> vars;
        std::map<std::string, std::size_t> index;
        for (const auto& rv : variables_) {
            if (index.count(rv.name))
                throw ParseError("duplicate variable '" + rv.name + "'", rv.at.line, rv.at.column);
            try {
                vars.emplace_back(rv.name, rv.states);
            } catch (const FactorError& e) {
                throw ParseError(e.what(), rv.at.line, rv.at.column);
            }
            index[rv.name] = vars.size() - 1;
        }

        const std::size_t n = vars.size();
        std::vector<std::vector<std::size_t>> parents(n);
        std::vector<std::optional<Factor>> cpts(n);
        for (const auto& rp : probabilities_) {
            auto lookup = [&](const std::string& nm) {
                auto it = index.find(nm);
                if (it == index.end())
                    throw ParseError("unknown variable '" + nm + "'", rp.at.line, rp.at.column);
                return it->second;
            };
            const std::size_t child = lookup(rp.child);
            if (cpts[child])
                throw ParseError("second probability block for '" + rp.child + "'", rp.at.line, rp.at.column);
            for (const auto& pn : rp.parents) parents[child].push_back(lookup(pn));
            cpts[child] = build_cpt(rp, vars, parents[child], child);
        }

        std::vector<Factor> tables;
        for (std::size_t i = 0; i < n; ++i) {
            if (!cpts[i]) {
                const auto& at = variables_[i].at;
                throw ParseError("no probability block for '" + vars[i].name() + "'", at.line, at.column);
            }
            tables.push_back(std::move(*cpts[i]));
        }
        return DiscreteNetwork(std::move(name), std::move(vars), std::move(parents), std::move(tables));
    }

    static std::string conditional_name(const RawProbability& rp, const std::vector<std::string>& labels) {
        std::string s = "P(" + rp.child;
        if (!rp.parents.empty()) {
            s += " | ";
            for (std::size_t i = 0; i < labels.size(); ++i) {
                if (i) s += ", ";
                s += rp.parents[i] + "=" + labels[i];
            }
        }
        return s + ")";
    }

    Factor build_cpt(const RawProbability& rp, const std::vector<Variable>& vars,
                     const std::vector<std::size_t>& parents, std::size_t child) const {
        std::vector<Variable> scope;
        std::size_t rows = 1;
        for (auto p : parents) {
            scope.push_back(vars[p]);
            rows *= vars[p].cardinality();
        }
        scope.push_back(vars[child]);
        const std::size_t k = vars[child].cardinality();
        std::vector<double> values(rows * k, 0.0);
        std::vector<bool> filled(rows, false);

        auto bad = [&](const std::string& msg) { return ParseError(msg, rp.at.line, rp.at.column); };
        auto put_row = [&](std::size_t row, const std::vector<double>& probs) {
            if (probs.size() != k)
                throw bad("row for '" + rp.child + "' has " + std::to_string(probs.size()) +
                          " entries, expected " + std::to_string(k));
            for (std::size_t j = 0; j < k; ++j) values[row * k + j] = probs[j];
            filled[row] = true;
        };

        if (rp.table) {
            if (rp.table->size() != rows * k)
                throw bad("table for '" + rp.child + "' has " + std::to_string(rp.table->size()) +
                          " entries, expected " + std::to_string(rows * k));
            for (std::size_t r = 0; r < rows; ++r)
                put_row(r, std::vector<double>(rp.table->begin() + static_cast<long>(r * k),
                                               rp.table->begin() + static_cast<long>((r + 1) * k)));
        }
        if (rp.default_row)
            for (std::size_t r = 0; r < rows; ++r) put_row(r, *rp.default_row);
        for (const auto& [labels, probs] : rp.rows) {
            if (labels.size() != parents.size())
                throw bad("row for '" + rp.child + "' names " + std::to_string(labels.size()) +
                          " parent states, expected " + std::to_string(parents.size()));
            std::size_t row = 0;
            for (std::size_t i = 0; i < parents.size(); ++i) {
                const auto& pv = vars[parents[i]];
                if (!pv.has_state(labels[i]))
                    throw bad("variable '" + pv.name() + "' has no state '" + labels[i] + "'");
                row = row * pv.cardinality() + pv.state_index(labels[i]);
            }
            put_row(row, probs);
        }

        for (std::size_t r = 0; r < rows; ++r) {
            std::vector<std::string> labels;
            for (std::size_t i = 0, rem = r, div = rows; i < parents.size(); ++i) {
                div /= vars[parents[i]].cardinality();
                labels.push_back(vars[parents[i]].states()[rem / div]);
                rem %= div;
            }
            if (!filled[r]) throw bad("missing row " + conditional_name(rp, labels));
            double s = 0.0;
            for (std::size_t j = 0; j < k; ++j) {
                if (values[r * k + j] < 0.0) throw bad("negative probability in " + conditional_name(rp, labels));
                s += values[r * k + j];
            }
            if (std::abs(s - 1.0) > kRowTolerance)
                throw ValidationError(conditional_name(rp, labels) + " sums to " + std::to_string(s));
            for (std::size_t j = 0; j < k; ++j) values[r * k + j] /= s;
        }
        return Factor(std::move(scope), std::move(values));
    }

    Lexer lex_;
    Token cur_{Token::End, "", 0, 0};
    std::vector<RawVariable> variables_;
    std::vector<RawProbability> probabilities_;
};

} // namespace

DiscreteNetwork parse_bif(std::string_view text) { return Parser(text).run(); }

DiscreteNetwork load_bif_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_bif(ss.str());
}

std::string write_bif(const DiscreteNetwork& net) {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "network " << net.name() << " {\n}\n";
    for (const auto& v : net.variables()) {
        os << "variable " << v.name() << " {\n  type discrete [ " << v.cardinality() << " ] { ";
        for (std::size_t i = 0; i < v.cardinality(); ++i) os << (i ? ", " : "") << v.states()[i];
        os << " };\n}\n";
    }
    for (std::size_t i = 0; i < net.size(); ++i) {
        const auto& ps = net.parents(i);
        const auto& cpt = net.cpt(i);
        const std::size_t k = net.variable(i).cardinality();
        os << "probability ( " << net.variable(i).name();
        for (std::size_t j = 0; j < ps.size(); ++j)
            os << (j ? ", " : " | ") << net.variable(ps[j]).name();
        os << " ) {\n";
        const std::size_t rows = cpt.size() / k;
        for (std::size_t r = 0; r < rows; ++r) {
            os << "  ";
            if (ps.empty()) {
                os << "table ";
            } else {
                os << '(';
                for (std::size_t j = 0, rem = r, div = rows; j < ps.size(); ++j) {
                    const auto& pv = net.variable(ps[j]);
                    div /= pv.cardinality();
                    os << (j ? ", " : "") << pv.states()[rem / div];
                    rem %= div;
                }
                os << ") ";
            }
            for (std::size_t j = 0; j < k; ++j) os << (j ? ", " : "") << cpt[r * k + j];
            os << ";\n";
        }
        os << "}\n";
    }
    return os.str();
}

} // namespace factorarg
