#include "csmw/guard.hpp"

#include "csmw/error.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace csmw {

struct Guard::Node {
    Kind kind;
    Symbol symbol;
    std::vector<Guard> children;
};

namespace {

bool is_symbol_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool is_symbol_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_'; }

const Symbol kNoSymbol;

} // namespace

bool is_valid_symbol(std::string_view text) {
    if (text.empty() || !is_symbol_start(text.front()))
        return false;
    return std::all_of(text.begin(), text.end(), is_symbol_char);
}

Guard::Guard() : Guard(never()) {}

Guard::Guard(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Guard Guard::never() {
    static const Guard g(std::make_shared<const Node>(Node{Kind::False, {}, {}}));
    return g;
}

Guard Guard::always() {
    static const Guard g(std::make_shared<const Node>(Node{Kind::True, {}, {}}));
    return g;
}

Guard Guard::var(Symbol name) {
    if (!is_valid_symbol(name))
        throw std::invalid_argument("invalid guard symbol '" + name + "'");
    return Guard(std::make_shared<const Node>(Node{Kind::Var, std::move(name), {}}));
}

Guard Guard::negate(Guard child) {
    return Guard(std::make_shared<const Node>(Node{Kind::Not, {}, {std::move(child)}}));
}

Guard Guard::conj(std::vector<Guard> children) {
    if (children.size() < 2)
        throw std::invalid_argument("conjunction needs at least two operands");
    return Guard(std::make_shared<const Node>(Node{Kind::And, {}, std::move(children)}));
}

Guard Guard::disj(std::vector<Guard> children) {
    if (children.size() < 2)
        throw std::invalid_argument("disjunction needs at least two operands");
    return Guard(std::make_shared<const Node>(Node{Kind::Or, {}, std::move(children)}));
}

Guard::Kind Guard::kind() const noexcept { return node_->kind; }

const Symbol& Guard::symbol() const noexcept {
    return node_->kind == Kind::Var ? node_->symbol : kNoSymbol;
}

std::span<const Guard> Guard::children() const noexcept { return node_->children; }

std::string Guard::str() const { return render(*this); }

// ---------------------------------------------------------------------------
// Rendering

namespace {

bool is_nary(const Guard& g) { return g.kind() == Guard::Kind::And || g.kind() == Guard::Kind::Or; }

void render_into(const Guard& g, std::string& out);

void render_operand(const Guard& parent, const Guard& child, std::string& out) {
    // A conjunction directly under a disjunction binds tighter and needs no
    // parentheses; every other nested n-ary node keeps them so the parse tree
    // shape survives a round trip.
    bool parens = is_nary(child) && !(parent.kind() == Guard::Kind::Or && child.kind() == Guard::Kind::And);
    if (parent.kind() == Guard::Kind::Not)
        parens = is_nary(child);
    if (parens)
        out += '(';
    render_into(child, out);
    if (parens)
        out += ')';
}

void render_into(const Guard& g, std::string& out) {
    switch (g.kind()) {
    case Guard::Kind::False:
        out += '0';
        return;
    case Guard::Kind::True:
        out += '1';
        return;
    case Guard::Kind::Var:
        out += g.symbol();
        return;
    case Guard::Kind::Not:
        out += '~';
        render_operand(g, g.children()[0], out);
        return;
    case Guard::Kind::And:
    case Guard::Kind::Or: {
        const char* sep = g.kind() == Guard::Kind::And ? "*" : " + ";
        bool first = true;
        for (const Guard& child : g.children()) {
            if (!first)
                out += sep;
            first = false;
            render_operand(g, child, out);
        }
        return;
    }
    }
}

// Render with n-ary children sorted; equal keys mean structurally equal
// trees up to child order.
std::string canonical_key(const Guard& g) {
    switch (g.kind()) {
    case Guard::Kind::False:
        return "0";
    case Guard::Kind::True:
        return "1";
    case Guard::Kind::Var:
        return g.symbol();
    case Guard::Kind::Not:
        return "~(" + canonical_key(g.children()[0]) + ")";
    case Guard::Kind::And:
    case Guard::Kind::Or: {
        std::vector<std::string> keys;
        for (const Guard& child : g.children())
            keys.push_back(canonical_key(child));
        std::sort(keys.begin(), keys.end());
        std::string out = g.kind() == Guard::Kind::And ? "&(" : "|(";
        for (const std::string& k : keys)
            out += k + ",";
        out += ")";
        return out;
    }
    }
    return {};
}

} // namespace

std::string render(const Guard& guard) {
    std::string out;
    render_into(guard, out);
    return out;
}

bool operator==(const Guard& lhs, const Guard& rhs) {
    if (lhs.node_ == rhs.node_)
        return true;
    return canonical_key(lhs) == canonical_key(rhs);
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

class GuardParser {
public:
    explicit GuardParser(std::string_view text) : text_(text) {}

    Guard parse() {
        skip_space();
        if (pos_ == text_.size())
            throw GuardSyntaxError(pos_, "empty guard");
        Guard g = parse_or();
        skip_space();
        if (pos_ != text_.size())
            throw GuardSyntaxError(pos_, std::string("unexpected '") + text_[pos_] + "'");
        return g;
    }

private:
    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Guard parse_or() {
        std::vector<Guard> terms{parse_and()};
        while (accept('+'))
            terms.push_back(parse_and());
        return terms.size() == 1 ? terms.front() : Guard::disj(std::move(terms));
    }

    Guard parse_and() {
        std::vector<Guard> factors{parse_not()};
        while (accept('*'))
            factors.push_back(parse_not());
        return factors.size() == 1 ? factors.front() : Guard::conj(std::move(factors));
    }

    Guard parse_not() {
        if (accept('~'))
            return Guard::negate(parse_not());
        return parse_atom();
    }

    Guard parse_atom() {
        skip_space();
        if (pos_ == text_.size())
            throw GuardSyntaxError(pos_, "unexpected end of guard");
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            Guard inner = parse_or();
            if (!accept(')'))
                throw GuardSyntaxError(pos_, "expected ')'");
            return inner;
        }
        if (c == '0' || c == '1') {
            ++pos_;
            if (pos_ < text_.size() && is_symbol_char(text_[pos_]))
                throw GuardSyntaxError(pos_ - 1, "symbols must start with a letter");
            return c == '0' ? Guard::never() : Guard::always();
        }
        if (is_symbol_start(c)) {
            std::size_t start = pos_;
            while (pos_ < text_.size() && is_symbol_char(text_[pos_]))
                ++pos_;
            return Guard::var(Symbol(text_.substr(start, pos_ - start)));
        }
        throw GuardSyntaxError(pos_, std::string("unexpected '") + c + "'");
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

} // namespace

Guard parse_guard(std::string_view text) { return GuardParser(text).parse(); }

// ---------------------------------------------------------------------------
// Algebra

bool evaluate(const Guard& guard, const SymbolSet& audible) {
    return evaluate_with(guard, [&](const Symbol& s) { return audible.count(s) != 0; });
}

namespace {

Guard fold_nary(Guard::Kind kind, std::vector<Guard> operands) {
    const Guard::Kind absorbing = kind == Guard::Kind::And ? Guard::Kind::False : Guard::Kind::True;
    const Guard::Kind neutral = kind == Guard::Kind::And ? Guard::Kind::True : Guard::Kind::False;
    std::vector<Guard> kept;
    for (Guard& op : operands) {
        if (op.kind() == absorbing)
            return op;
        if (op.kind() == neutral)
            continue;
        if (op.kind() == kind) {
            for (const Guard& grandchild : op.children())
                kept.push_back(grandchild);
        } else {
            kept.push_back(std::move(op));
        }
    }
    if (kept.empty())
        return neutral == Guard::Kind::True ? Guard::always() : Guard::never();
    if (kept.size() == 1)
        return kept.front();
    return kind == Guard::Kind::And ? Guard::conj(std::move(kept)) : Guard::disj(std::move(kept));
}

} // namespace

Guard product(const Guard& lhs, const Guard& rhs) { return fold_nary(Guard::Kind::And, {lhs, rhs}); }

Guard sum(const Guard& lhs, const Guard& rhs) { return fold_nary(Guard::Kind::Or, {lhs, rhs}); }

Guard restrict(const Guard& guard, const std::map<Symbol, bool>& assignment) {
    switch (guard.kind()) {
    case Guard::Kind::False:
    case Guard::Kind::True:
        return guard;
    case Guard::Kind::Var: {
        auto it = assignment.find(guard.symbol());
        if (it == assignment.end())
            return guard;
        return it->second ? Guard::always() : Guard::never();
    }
    case Guard::Kind::Not: {
        Guard inner = restrict(guard.children()[0], assignment);
        if (inner.kind() == Guard::Kind::True)
            return Guard::never();
        if (inner.kind() == Guard::Kind::False)
            return Guard::always();
        return Guard::negate(std::move(inner));
    }
    case Guard::Kind::And:
    case Guard::Kind::Or: {
        std::vector<Guard> operands;
        operands.reserve(guard.children().size());
        for (const Guard& child : guard.children())
            operands.push_back(restrict(child, assignment));
        return fold_nary(guard.kind(), std::move(operands));
    }
    }
    return guard;
}

namespace {

void collect_symbols(const Guard& g, SymbolSet& out) {
    if (g.kind() == Guard::Kind::Var)
        out.insert(g.symbol());
    for (const Guard& child : g.children())
        collect_symbols(child, out);
}

// Calls `visit` with every valuation of `symbols`; stops early when it
// returns false. Returns false iff stopped early.
template <class Visit>
bool for_each_valuation(const std::vector<Symbol>& symbols, Visit visit) {
    if (symbols.size() > kMaxTruthTableSymbols)
        throw Error("guard-too-many-symbols", "truth table over " + std::to_string(symbols.size()) +
                                                  " symbols exceeds the limit of " +
                                                  std::to_string(kMaxTruthTableSymbols));
    const std::uint64_t rows = std::uint64_t{1} << symbols.size();
    for (std::uint64_t mask = 0; mask < rows; ++mask) {
        auto value_of = [&](const Symbol& s) {
            auto it = std::lower_bound(symbols.begin(), symbols.end(), s);
            return it != symbols.end() && *it == s && ((mask >> (it - symbols.begin())) & 1U) != 0;
        };
        if (!visit(value_of))
            return false;
    }
    return true;
}

} // namespace

SymbolSet symbols_of(const Guard& guard) {
    SymbolSet out;
    collect_symbols(guard, out);
    return out;
}

bool is_never(const Guard& guard) {
    if (guard.is_constant())
        return guard.kind() == Guard::Kind::False;
    SymbolSet syms = symbols_of(guard);
    std::vector<Symbol> ordered(syms.begin(), syms.end());
    return for_each_valuation(ordered, [&](const auto& value_of) { return !evaluate_with(guard, value_of); });
}

bool equivalent(const Guard& lhs, const Guard& rhs) {
    SymbolSet syms = symbols_of(lhs);
    syms.merge(symbols_of(rhs));
    std::vector<Symbol> ordered(syms.begin(), syms.end());
    return for_each_valuation(ordered, [&](const auto& value_of) {
        return evaluate_with(lhs, value_of) == evaluate_with(rhs, value_of);
    });
}

} // namespace csmw
