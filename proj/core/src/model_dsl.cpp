#include "csmw/model.hpp"

#include <sstream>
#include <tuple>

namespace csmw {

namespace {

std::vector<std::string> tokenize(std::string_view line) {
    if (auto hash = line.find('#'); hash != std::string_view::npos)
        line = line.substr(0, hash);
    std::vector<std::string> tokens;
    std::istringstream in{std::string(line)};
    for (std::string tok; in >> tok;)
        tokens.push_back(tok);
    return tokens;
}

// `Module.state`, split at the first dot.
std::pair<std::string, std::string> split_qualified(const std::string& token, int line) {
    auto dot = token.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == token.size())
        throw ModelSyntaxError(line, "expected <Module>.<state>, got '" + token + "'");
    return {token.substr(0, dot), token.substr(dot + 1)};
}

class DslParser {
public:
    explicit DslParser(std::string_view text) : text_(text) {}

    SystemModel parse() {
        std::size_t pos = 0;
        int line_no = 0;
        bool any_content = false;
        while (pos <= text_.size()) {
            auto nl = text_.find('\n', pos);
            std::string_view raw = text_.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
            ++line_no;
            auto tokens = tokenize(raw);
            if (!tokens.empty()) {
                any_content = true;
                line_ = line_no;
                dispatch(tokens);
            }
            if (nl == std::string_view::npos)
                break;
            pos = nl + 1;
        }
        if (block_ != Block::None)
            throw ModelSyntaxError(block_line_, "block is not closed with 'end'");
        if (!any_content)
            throw ModelSyntaxError(1, "empty model");
        if (!saw_system_)
            throw ModelSyntaxError(1, "missing 'system <name>' declaration");
        return std::move(model_);
    }

private:
    enum class Block { None, Module, Refine };

    [[noreturn]] void fail(const std::string& message) const { throw ModelSyntaxError(line_, message); }

    void expect_count(const std::vector<std::string>& t, std::size_t n, const char* usage) const {
        if (t.size() != n)
            fail(std::string("expected '") + usage + "'");
    }

    void dispatch(const std::vector<std::string>& t) {
        const std::string& kw = t[0];
        if (block_ != Block::None) {
            if (kw == "end") {
                expect_count(t, 1, "end");
                block_ = Block::None;
            } else if (kw == "initial") {
                expect_count(t, 2, "initial <state>");
                std::string& initial = block_ == Block::Module ? model_.modules.back().initial
                                                               : model_.refinements.back().sub_initial;
                if (!initial.empty())
                    fail("initial state declared twice");
                initial = t[1];
            } else if (kw == "states") {
                if (t.size() < 2)
                    fail("expected 'states <s1> <s2> ...'");
                auto& states = block_ == Block::Module ? model_.modules.back().states : model_.refinements.back().substates;
                states.insert(states.end(), t.begin() + 1, t.end());
            } else if (kw == "trans" || kw == "synth") {
                auto& list = block_ == Block::Module ? model_.modules.back().transitions
                                                     : model_.refinements.back().transitions;
                list.push_back(parse_transition(t));
            } else {
                fail("unexpected '" + kw + "' inside block");
            }
            return;
        }

        if (kw == "system") {
            expect_count(t, 2, "system <name>");
            if (saw_system_)
                fail("system declared twice");
            saw_system_ = true;
            model_.name = t[1];
        } else if (kw == "module") {
            expect_count(t, 2, "module <Name>");
            ModuleDiagram m;
            m.name = t[1];
            m.line = {line_};
            model_.modules.push_back(std::move(m));
            open(Block::Module);
        } else if (kw == "refine") {
            expect_count(t, 2, "refine <Module>.<super>");
            Refinement r;
            std::tie(r.module, r.super_state) = split_qualified(t[1], line_);
            r.line = {line_};
            model_.refinements.push_back(std::move(r));
            open(Block::Refine);
        } else if (kw == "enforce") {
            if (t.size() != 7 || t[2] != "->" || t[4] != ":")
                fail("expected 'enforce <A> -> <B> : <a> <b>'");
            model_.constraints.push_back(EnforcementConstraint{t[1], t[3], t[5], t[6], {line_}});
        } else if (kw == "event") {
            if (t.size() < 4 || t[2] != "=")
                fail("expected 'event <abstract> = <c1> <c2> ...'");
            model_.hierarchy.splits.push_back(EventSplit{t[1], {t.begin() + 3, t.end()}, {line_}});
        } else if (kw == "accept") {
            if (t.size() < 6 || t[2] != "in" || t[4] != ":")
                fail("expected 'accept <event> in <Module>.<super> : <sub1> ...'");
            auto [module, super] = split_qualified(t[3], line_);
            model_.hierarchy.acceptance.push_back(Acceptance{t[1], module, super, {t.begin() + 5, t.end()}, {line_}});
        } else if (kw == "end") {
            fail("'end' without an open block");
        } else {
            fail("unknown keyword '" + kw + "'");
        }
    }

    void open(Block b) {
        block_ = b;
        block_line_ = line_;
    }

    DiagramTransition parse_transition(const std::vector<std::string>& t) const {
        // trans <src> -> <dst> on <event> [emit <e1> ...]
        if (t.size() < 6 || t[2] != "->" || t[4] != "on")
            fail("expected '" + t[0] + " <src> -> <dst> on <event> [emit <e1> ...]'");
        DiagramTransition tr;
        tr.source = t[1];
        tr.target = t[3];
        tr.trigger = t[5];
        tr.origin = t[0] == "synth" ? Origin::Synthesized : Origin::Authored;
        tr.line = {line_};
        if (t.size() > 6) {
            if (t[6] != "emit" || t.size() == 7)
                fail("expected 'emit <e1> ...' after the trigger");
            tr.emits.assign(t.begin() + 7, t.end());
        }
        return tr;
    }

    std::string_view text_;
    SystemModel model_;
    Block block_ = Block::None;
    int block_line_ = 0;
    int line_ = 0;
    bool saw_system_ = false;
};

void render_transition(std::ostream& out, const DiagramTransition& t) {
    out << "  " << (t.origin == Origin::Synthesized ? "synth" : "trans") << ' ' << t.source << " -> " << t.target
        << " on " << t.trigger;
    if (!t.emits.empty()) {
        out << " emit";
        for (const Symbol& e : t.emits)
            out << ' ' << e;
    }
    out << '\n';
}

void render_states(std::ostream& out, const std::vector<std::string>& states) {
    if (states.empty())
        return;
    out << "  states";
    for (const std::string& s : states)
        out << ' ' << s;
    out << '\n';
}

} // namespace

SystemModel parse_model_unchecked(std::string_view text) { return DslParser(text).parse(); }

SystemModel parse_model(std::string_view text) {
    SystemModel model = parse_model_unchecked(text);
    if (auto diagnostics = validate(model); !diagnostics.empty())
        throw ModelError(std::move(diagnostics));
    return model;
}

std::string render_model(const SystemModel& model) {
    std::ostringstream out;
    out << "system " << model.name << '\n';
    for (const ModuleDiagram& m : model.modules) {
        out << "\nmodule " << m.name << '\n';
        if (!m.initial.empty())
            out << "  initial " << m.initial << '\n';
        render_states(out, m.states);
        for (const DiagramTransition& t : m.transitions)
            render_transition(out, t);
        out << "end\n";
    }
    if (!model.constraints.empty()) {
        out << '\n';
        for (const EnforcementConstraint& c : model.constraints)
            out << "enforce " << c.from_module << " -> " << c.to_module << " : " << c.from_state << ' ' << c.to_state
                << '\n';
    }
    for (const Refinement& r : model.refinements) {
        out << "\nrefine " << r.module << '.' << r.super_state << '\n';
        if (!r.sub_initial.empty())
            out << "  initial " << r.sub_initial << '\n';
        render_states(out, r.substates);
        for (const DiagramTransition& t : r.transitions)
            render_transition(out, t);
        out << "end\n";
    }
    if (!model.hierarchy.empty())
        out << '\n';
    for (const EventSplit& s : model.hierarchy.splits) {
        out << "event " << s.abstract_event << " =";
        for (const Symbol& c : s.concrete)
            out << ' ' << c;
        out << '\n';
    }
    for (const Acceptance& a : model.hierarchy.acceptance) {
        out << "accept " << a.event << " in " << a.module << '.' << a.super_state << " :";
        for (const std::string& s : a.substates)
            out << ' ' << s;
        out << '\n';
    }
    return out.str();
}

} // namespace csmw
