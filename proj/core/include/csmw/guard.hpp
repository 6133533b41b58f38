#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace csmw {

using Symbol = std::string;
using SymbolSet = std::set<Symbol>;

/// True iff `text` matches `[A-Za-z][A-Za-z0-9_]*`.
bool is_valid_symbol(std::string_view text);

/// Truth-table procedures refuse formulas over more distinct symbols than this.
inline constexpr std::size_t kMaxTruthTableSymbols = 24;

/// Boolean formula labelling a CSM transition.
///
/// Guards are immutable syntax trees with shared structure; copying is cheap
/// and values may be shared freely between threads. The raw constructors
/// build exactly the tree they are given. `product` and `restrict` fold
/// constants; nothing normalizes further.
class Guard {
public:
    enum class Kind { False, True, Var, Not, And, Or };

    /// Constant 0.
    Guard();

    static Guard never();
    static Guard always();
    static Guard var(Symbol name);
    static Guard negate(Guard child);
    /// Requires at least two children.
    static Guard conj(std::vector<Guard> children);
    /// Requires at least two children.
    static Guard disj(std::vector<Guard> children);

    Kind kind() const noexcept;
    /// Symbol of a `Var` node; empty otherwise.
    const Symbol& symbol() const noexcept;
    std::span<const Guard> children() const noexcept;

    bool is_constant() const noexcept { return kind() == Kind::False || kind() == Kind::True; }

    /// Canonical text in the guard grammar.
    std::string str() const;

    /// Structural equality with And/Or children compared as multisets.
    friend bool operator==(const Guard& lhs, const Guard& rhs);

private:
    struct Node;
    explicit Guard(std::shared_ptr<const Node> node);
    std::shared_ptr<const Node> node_;
};

/// Parses `or := and ('+' and)*`, `and := not ('*' not)*`,
/// `not := '~' not | atom`, `atom := symbol | '0' | '1' | '(' or ')'`.
/// Throws GuardSyntaxError carrying the byte offset of the problem.
Guard parse_guard(std::string_view text);

std::string render(const Guard& guard);

/// Symbols absent from `audible` are false.
bool evaluate(const Guard& guard, const SymbolSet& audible);

/// Evaluates with an arbitrary symbol valuation.
template <class Valuation>
bool evaluate_with(const Guard& guard, const Valuation& value_of) {
    switch (guard.kind()) {
    case Guard::Kind::False:
        return false;
    case Guard::Kind::True:
        return true;
    case Guard::Kind::Var:
        return value_of(guard.symbol());
    case Guard::Kind::Not:
        return !evaluate_with(guard.children()[0], value_of);
    case Guard::Kind::And:
        for (const Guard& child : guard.children())
            if (!evaluate_with(child, value_of))
                return false;
        return true;
    case Guard::Kind::Or:
        for (const Guard& child : guard.children())
            if (evaluate_with(child, value_of))
                return true;
        return false;
    }
    return false;
}

/// Conjunction with constant folding: 0 absorbs, 1 drops out.
Guard product(const Guard& lhs, const Guard& rhs);

/// Disjunction with constant folding: 1 absorbs, 0 drops out.
Guard sum(const Guard& lhs, const Guard& rhs);

/// Substitutes assigned symbols by constants and folds.
Guard restrict(const Guard& guard, const std::map<Symbol, bool>& assignment);

SymbolSet symbols_of(const Guard& guard);

/// True iff no subset of the guard's symbols satisfies it. Decided by
/// truth-table enumeration; throws Error("guard-too-many-symbols") above
/// kMaxTruthTableSymbols.
bool is_never(const Guard& guard);

/// Logical equivalence by truth table over the union of both symbol sets.
bool equivalent(const Guard& lhs, const Guard& rhs);

} // namespace csmw
