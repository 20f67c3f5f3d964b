#include "beliefscope/endoscopy.hpp"

#include "beliefscope/error.hpp"
#include "beliefscope/relational.hpp"

#include <algorithm>
#include <cctype>

namespace beliefscope {

namespace {

struct Token {
    std::string text;  // as written
    std::string lower; // case-folded
    std::size_t column = 0;
};

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < text.size()) {
        if (std::isspace(static_cast<unsigned char>(text[i]))) {
            ++i;
            continue;
        }
        std::size_t j = i;
        if (text[i] == '&') {
            j = i + 1;
        } else {
            while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])) && text[j] != '&') ++j;
        }
        Token t{std::string(text.substr(i, j - i)), {}, i + 1};
        t.lower = t.text;
        std::transform(t.lower.begin(), t.lower.end(), t.lower.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        out.push_back(std::move(t));
        i = j;
    }
    return out;
}

bool is_keyword(const std::string& w) {
    return w == "if" || w == "then" || w == "surrounding" || w == "adjacent" || w == "static" || w == "&" || w == "or";
}

struct Feature {
    std::vector<std::string> colours;
    std::string noun;
    std::string id;
};

class RuleParser {
public:
    explicit RuleParser(std::string_view text) : text_(text), tokens_(tokenize(text)) {}

    NetworkSpec compile(const CptDefaults& d) {
        expect("if", "rule must start with IF");
        Feature first = feature();
        std::optional<Feature> second;
        std::optional<std::string> relation;
        bool temporal = false;
        std::size_t amp_column = 0;

        if (peek_is("surrounding") || peek_is("adjacent")) {
            relation = next().lower;
            second = feature();
        } else if (!at_end() && !peek_is("&") && !peek_is("then")) {
            error(peek(), "unknown relation " + peek().text);
        }
        if (peek_is("&")) {
            amp_column = next().column;
            if (at_end()) error_at_end("expected STATIC after '&'");
            const Token& t = next();
            if (t.lower != "static") error(t, "unknown temporal qualifier " + t.text);
            temporal = true;
            // rule texts often read "static in image"; the phrase adds nothing
            if (peek_is("in")) {
                next();
                if (at_end()) error_at_end("expected 'image' after 'in'");
                if (!peek_is("image")) error(peek(), "expected 'image' after 'in', got " + peek().text);
                next();
            }
        }
        if (at_end()) error_at_end("expected THEN");
        if (!peek_is("then")) error(peek(), "expected THEN, got " + peek().text);
        next();
        if (at_end()) error_at_end("expected an object after THEN");
        std::string object;
        while (!at_end()) object += (object.empty() ? "" : "_") + next().lower;

        if (temporal && relation) throw ParseError("STATIC cannot be combined with a spatial relation at column " +
                                                       std::to_string(amp_column),
                                                   1, amp_column);
        if (second && second->id == first.id) second->id += "_2";
        if (first.id == object || (second && second->id == object))
            throw ParseError("object '" + object + "' collides with a feature name", 1, 1);

        return build(d, object, first, second, relation, temporal);
    }

private:
    Feature feature() {
        Feature f;
        if (at_end()) error_at_end("expected a colour class");
        for (;;) {
            const Token& t = next();
            if (!parse_colour(t.lower)) error(t, "unknown colour class " + t.text);
            f.colours.push_back(t.lower);
            if (peek_is("or")) {
                next();
                if (at_end()) error_at_end("expected a colour class after 'or'");
                continue;
            }
            if (!at_end() && parse_colour(peek().lower)) continue;
            break;
        }
        if (at_end() || is_keyword(peek().lower)) {
            if (at_end()) error_at_end("expected a noun after the colour class");
            error(peek(), "expected a noun after the colour class, got " + peek().text);
        }
        f.noun = next().lower;
        for (std::size_t i = 0; i < f.colours.size(); ++i) f.id += (i ? "_or_" : "") + f.colours[i];
        f.id += "_" + f.noun;
        return f;
    }

    NetworkSpec build(const CptDefaults& d, const std::string& object, const Feature& first,
                      const std::optional<Feature>& second, const std::optional<std::string>& relation,
                      bool temporal) const {
        auto lik = [](double hit, double fa) { return Matrix{{hit, complement(hit)}, {fa, complement(fa)}}; };
        NetworkSpec s;
        s.root = object;
        NodeSpec root;
        root.id = object;
        root.states = {object, "not_" + object};
        root.cpt = {{d.prior, complement(d.prior)}};
        s.nodes.push_back(root);

        auto add_feature = [&](const Feature& f) {
            NodeSpec n;
            n.id = f.id;
            n.states = {"present", "absent"};
            n.parents = {object};
            n.cpt = lik(d.feature_hit, d.feature_false_alarm);
            s.nodes.push_back(n);
            s.bind.emplace_back(f.id, FeatureBinding{f.colours, std::nullopt});
        };
        auto add_relation = [&](std::string id, std::string evaluator, std::vector<std::string> states,
                                std::vector<std::string> inputs) {
            NodeSpec n;
            n.id = std::move(id);
            n.kind = NodeKind::relation;
            n.states = std::move(states);
            n.parents = {object};
            n.cpt = lik(d.relation_hit, d.relation_false_alarm);
            n.evaluator = std::move(evaluator);
            n.inputs = std::move(inputs);
            s.nodes.push_back(n);
        };

        add_feature(first);
        if (second) add_feature(*second);
        if (relation == "surrounding")
            add_relation("topo_relation", "surrounding", {"holds", "holds_not"}, {first.id, second->id});
        else if (relation == "adjacent")
            add_relation("distance_relation", "distance", {"adjacent", "far"}, {first.id, second->id});
        if (temporal) {
            add_relation("static_relation", "static", {"holds", "holds_not"}, {first.id});
            s.window = WindowSpec{d.window, std::nullopt};
        }
        return s;
    }

    bool at_end() const { return pos_ >= tokens_.size(); }
    const Token& peek() const { return tokens_.at(pos_); }
    bool peek_is(std::string_view w) const { return !at_end() && peek().lower == w; }
    const Token& next() { return tokens_.at(pos_++); }

    void expect(std::string_view w, const std::string& msg) {
        if (at_end()) error_at_end(msg);
        if (peek().lower != w) error(peek(), msg);
        next();
    }

    [[noreturn]] void error(const Token& t, const std::string& msg) const {
        throw ParseError("syntax error at column " + std::to_string(t.column) + ": " + msg, 1, t.column);
    }

    [[noreturn]] void error_at_end(const std::string& msg) const {
        const auto col = text_.size() + 1;
        throw ParseError("syntax error at column " + std::to_string(col) + ": " + msg, 1, col);
    }

    std::string_view text_;
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

} // namespace

NetworkSpec compile_rule(std::string_view text, const CptDefaults& defaults) {
    return RuleParser(text).compile(defaults);
}

} // namespace beliefscope
