/***************************************************************
 *  datalog.hpp
 *
 *  Ground-Datalog substrate: programs, ground atoms, fact sets,
 *  and bottom-up fixpoint evaluation.
 *
 *  Text format:
 *      % comment
 *      Edge(a,b).                       facts (ground)
 *      Path(X,Z) :- Edge(X,Y), Path(Y,Z).   rules (range-restricted)
 *  Identifiers are case-sensitive; variables start with an
 *  uppercase letter or '_', constants with a lowercase letter
 *  or a digit.
 *
 *  Evaluation is semi-naive and round-faithful: round n adds
 *  exactly the atoms first derivable by one rule application to
 *  the full set after n-1 rounds, so the round at which an atom
 *  first appears equals its derivation depth.  Closures support
 *  early exit on a target atom and bounded round counts; both
 *  are used heavily by core extraction.
 *
 *  All values are immutable after construction; every operation
 *  is safe to invoke concurrently on shared read-only inputs.
 ***************************************************************/

#ifndef SEMRD_DATALOG_HPP
#define SEMRD_DATALOG_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace semrd {

/*-----------------------------------------------------------
 * Errors
 *---------------------------------------------------------*/
class SemrdError : public std::runtime_error {
public:
    enum class Kind { Parse, Config, Logic, Numeric };

    SemrdError(Kind kind, std::string message)
        : std::runtime_error(std::move(message)), kind_(kind) {}

    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

/*-----------------------------------------------------------
 * Ground atoms
 *---------------------------------------------------------*/
struct GroundAtom {
    std::int32_t pred = -1;
    std::vector<std::int32_t> args;

    bool operator==(const GroundAtom& o) const {
        return pred == o.pred && args == o.args;
    }
    bool operator!=(const GroundAtom& o) const { return !(*this == o); }
};

struct AtomHash {
    std::size_t operator()(const GroundAtom& a) const {
        std::uint64_t h = 1469598103934665603ULL ^ static_cast<std::uint64_t>(a.pred);
        for (std::int32_t v : a.args) {
            h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(v)) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
        return static_cast<std::size_t>(h);
    }
};

/*-----------------------------------------------------------
 * Rules: atom templates with variables
 *---------------------------------------------------------*/
struct TemplateArg {
    bool is_var = false;
    std::int32_t id = -1; // variable id (rule-local) or constant id
};

struct AtomTemplate {
    std::int32_t pred = -1;
    std::vector<TemplateArg> args;
};

struct Rule {
    AtomTemplate head;
    std::vector<AtomTemplate> body; // nonempty
    int var_count = 0;
};

/*-----------------------------------------------------------
 * Program: predicate/constant symbol tables + rules
 *---------------------------------------------------------*/
class Program {
public:
    struct Predicate {
        std::string name;
        int arity = 0;
        bool is_idb = false; // appears in some rule head
    };

    std::int32_t intern_constant(const std::string& name) {
        auto it = const_ids_.find(name);
        if (it != const_ids_.end()) return it->second;
        std::int32_t id = static_cast<std::int32_t>(constants_.size());
        constants_.push_back(name);
        const_ids_.emplace(name, id);
        return id;
    }

    std::int32_t intern_predicate(const std::string& name, int arity) {
        auto it = pred_ids_.find(name);
        if (it != pred_ids_.end()) {
            if (predicates_[it->second].arity != arity) {
                throw SemrdError(SemrdError::Kind::Parse,
                                 "arity mismatch for predicate '" + name + "': declared " +
                                     std::to_string(predicates_[it->second].arity) + ", used " +
                                     std::to_string(arity));
            }
            return it->second;
        }
        std::int32_t id = static_cast<std::int32_t>(predicates_.size());
        predicates_.push_back(Predicate{name, arity, false});
        pred_ids_.emplace(name, id);
        return id;
    }

    std::optional<std::int32_t> find_predicate(const std::string& name) const {
        auto it = pred_ids_.find(name);
        if (it == pred_ids_.end()) return std::nullopt;
        return it->second;
    }

    std::optional<std::int32_t> find_constant(const std::string& name) const {
        auto it = const_ids_.find(name);
        if (it == const_ids_.end()) return std::nullopt;
        return it->second;
    }

    void add_rule(Rule rule) {
        predicates_[rule.head.pred].is_idb = true;
        rules_.push_back(std::move(rule));
    }

    const std::vector<Rule>& rules() const { return rules_; }
    const Predicate& predicate(std::int32_t id) const { return predicates_[static_cast<std::size_t>(id)]; }
    std::size_t predicate_count() const { return predicates_.size(); }
    const std::string& constant_name(std::int32_t id) const { return constants_[static_cast<std::size_t>(id)]; }
    std::size_t constant_count() const { return constants_.size(); }

    /// Rendered form "pred(c1,...,ck)"; lexicographic order on this
    /// string is the canonical order used throughout.
    std::string render(const GroundAtom& a) const {
        std::string s = predicate(a.pred).name;
        s += '(';
        for (std::size_t i = 0; i < a.args.size(); ++i) {
            if (i) s += ',';
            s += constant_name(a.args[i]);
        }
        s += ')';
        return s;
    }

    /// Canonical order.  Equivalent to comparing render() strings
    /// because ',' and ')' sort below every identifier character.
    bool atom_less(const GroundAtom& a, const GroundAtom& b) const {
        if (a.pred != b.pred) {
            int c = predicate(a.pred).name.compare(predicate(b.pred).name);
            if (c != 0) return c < 0;
        }
        const std::size_t n = std::min(a.args.size(), b.args.size());
        for (std::size_t i = 0; i < n; ++i) {
            if (a.args[i] != b.args[i]) {
                int c = constant_name(a.args[i]).compare(constant_name(b.args[i]));
                if (c != 0) return c < 0;
            }
        }
        return a.args.size() < b.args.size();
    }

private:
    std::vector<Predicate> predicates_;
    std::vector<std::string> constants_;
    std::unordered_map<std::string, std::int32_t> pred_ids_;
    std::unordered_map<std::string, std::int32_t> const_ids_;
    std::vector<Rule> rules_;
};

using ProgramPtr = std::shared_ptr<const Program>;

/*-----------------------------------------------------------
 * FactSet: duplicate-free, canonically ordered set of atoms
 *---------------------------------------------------------*/
class FactSet {
public:
    FactSet() = default;

    FactSet(ProgramPtr program, std::vector<GroundAtom> atoms)
        : program_(std::move(program)), atoms_(std::move(atoms)) {
        normalize();
    }

    const ProgramPtr& program() const { return program_; }
    std::size_t size() const { return atoms_.size(); }
    bool empty() const { return atoms_.empty(); }
    const GroundAtom& operator[](std::size_t i) const { return atoms_[i]; }
    auto begin() const { return atoms_.begin(); }
    auto end() const { return atoms_.end(); }
    const std::vector<GroundAtom>& atoms() const { return atoms_; }

    bool contains(const GroundAtom& a) const {
        auto it = std::lower_bound(atoms_.begin(), atoms_.end(), a,
                                   [this](const GroundAtom& x, const GroundAtom& y) {
                                       return program_->atom_less(x, y);
                                   });
        return it != atoms_.end() && *it == a;
    }

    FactSet with_removed(const GroundAtom& a) const {
        std::vector<GroundAtom> out;
        out.reserve(atoms_.size());
        for (const auto& x : atoms_)
            if (!(x == a)) out.push_back(x);
        return FactSet(program_, std::move(out));
    }

    FactSet with_added(const GroundAtom& a) const {
        std::vector<GroundAtom> out = atoms_;
        out.push_back(a);
        return FactSet(program_, std::move(out));
    }

    FactSet unioned(const FactSet& other) const {
        require_same_program(other);
        std::vector<GroundAtom> out = atoms_;
        out.insert(out.end(), other.atoms_.begin(), other.atoms_.end());
        return FactSet(program_, std::move(out));
    }

    FactSet intersected(const FactSet& other) const {
        require_same_program(other);
        std::vector<GroundAtom> out;
        for (const auto& x : atoms_)
            if (other.contains(x)) out.push_back(x);
        return FactSet(program_, std::move(out));
    }

    FactSet subtracted(const FactSet& other) const {
        require_same_program(other);
        std::vector<GroundAtom> out;
        for (const auto& x : atoms_)
            if (!other.contains(x)) out.push_back(x);
        return FactSet(program_, std::move(out));
    }

    bool is_subset_of(const FactSet& other) const {
        for (const auto& x : atoms_)
            if (!other.contains(x)) return false;
        return true;
    }

    bool operator==(const FactSet& o) const { return atoms_ == o.atoms_; }
    bool operator!=(const FactSet& o) const { return !(*this == o); }

    void require_same_program(const FactSet& other) const {
        if (program_.get() != other.program_.get())
            throw SemrdError(SemrdError::Kind::Logic,
                             "fact sets belong to different programs");
    }

private:
    void normalize() {
        std::sort(atoms_.begin(), atoms_.end(),
                  [this](const GroundAtom& x, const GroundAtom& y) {
                      return program_->atom_less(x, y);
                  });
        atoms_.erase(std::unique(atoms_.begin(), atoms_.end()), atoms_.end());
    }

    ProgramPtr program_;
    std::vector<GroundAtom> atoms_;
};

/*-----------------------------------------------------------
 * Parser
 *---------------------------------------------------------*/
struct ParsedProgram {
    ProgramPtr program;
    FactSet facts;
    std::size_t rule_count = 0;
};

namespace detail {

class Parser {
public:
    Parser(std::string text) : text_(std::move(text)) {}

    ParsedProgram run() {
        auto program = std::make_shared<Program>();
        std::vector<GroundAtom> facts;
        std::size_t rules = 0;
        skip_ws();
        while (!eof()) {
            parse_clause(*program, facts, rules);
            skip_ws();
        }
        // Reject duplicate rules (structural equality after parsing).
        for (std::size_t i = 0; i < program->rules().size(); ++i)
            for (std::size_t j = i + 1; j < program->rules().size(); ++j)
                if (rule_equal(program->rules()[i], program->rules()[j]))
                    throw err("duplicate rule");
        ProgramPtr frozen = program;
        return ParsedProgram{frozen, FactSet(frozen, std::move(facts)), rules};
    }

private:
    struct Token {
        std::string text;
        int line, col;
    };

    bool eof() const { return pos_ >= text_.size(); }
    char peek() const { return text_[pos_]; }

    void advance() {
        if (text_[pos_] == '\n') { ++line_; col_ = 1; } else { ++col_; }
        ++pos_;
    }

    void skip_ws() {
        while (!eof()) {
            char c = peek();
            if (c == '%') {
                while (!eof() && peek() != '\n') advance();
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else {
                break;
            }
        }
    }

    SemrdError err(const std::string& msg) const {
        return SemrdError(SemrdError::Kind::Parse,
                          "line " + std::to_string(line_) + ", col " + std::to_string(col_) +
                              ": " + msg);
    }

    static bool ident_start(char c) {
        return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_';
    }
    static bool ident_char(char c) {
        return ident_start(c) || (c >= '0' && c <= '9');
    }

    Token identifier() {
        skip_ws();
        if (eof() || !(ident_start(peek()) || (peek() >= '0' && peek() <= '9')))
            throw err("expected identifier");
        Token t{"", line_, col_};
        while (!eof() && ident_char(peek())) {
            t.text += peek();
            advance();
        }
        return t;
    }

    void expect(char c) {
        skip_ws();
        if (eof() || peek() != c)
            throw err(std::string("expected '") + c + "'");
        advance();
    }

    bool accept(char c) {
        skip_ws();
        if (!eof() && peek() == c) { advance(); return true; }
        return false;
    }

    bool accept_seq(const char* s) {
        skip_ws();
        std::size_t save_pos = pos_; int save_line = line_, save_col = col_;
        for (const char* p = s; *p; ++p) {
            if (eof() || peek() != *p) {
                pos_ = save_pos; line_ = save_line; col_ = save_col;
                return false;
            }
            advance();
        }
        return true;
    }

    struct RawAtom {
        Token pred;
        std::vector<Token> args;
    };

    RawAtom raw_atom() {
        RawAtom a;
        a.pred = identifier();
        expect('(');
        a.args.push_back(identifier());
        while (accept(',')) a.args.push_back(identifier());
        expect(')');
        return a;
    }

    static bool is_variable(const Token& t) {
        char c = t.text[0];
        return (c >= 'A' && c <= 'Z') || c == '_';
    }

    void parse_clause(Program& program, std::vector<GroundAtom>& facts, std::size_t& rules) {
        RawAtom head = raw_atom();
        if (accept_seq(":-")) {
            std::vector<RawAtom> body;
            body.push_back(raw_atom());
            while (accept(',')) body.push_back(raw_atom());
            expect('.');
            add_rule(program, head, body);
            ++rules;
        } else {
            expect('.');
            facts.push_back(ground(program, head));
        }
    }

    GroundAtom ground(Program& program, const RawAtom& raw) {
        GroundAtom atom;
        atom.pred = program.intern_predicate(raw.pred.text, static_cast<int>(raw.args.size()));
        for (const auto& t : raw.args) {
            if (is_variable(t))
                throw SemrdError(SemrdError::Kind::Parse,
                                 "line " + std::to_string(t.line) + ", col " + std::to_string(t.col) +
                                     ": non-ground fact (variable '" + t.text + "')");
            atom.args.push_back(program.intern_constant(t.text));
        }
        return atom;
    }

    void add_rule(Program& program, const RawAtom& rhead, const std::vector<RawAtom>& rbody) {
        Rule rule;
        std::unordered_map<std::string, std::int32_t> vars;
        auto convert = [&](const RawAtom& raw, bool allow_new_vars,
                           std::unordered_set<std::string>* body_vars) {
            AtomTemplate t;
            t.pred = program.intern_predicate(raw.pred.text, static_cast<int>(raw.args.size()));
            for (const auto& tok : raw.args) {
                TemplateArg a;
                if (is_variable(tok)) {
                    auto it = vars.find(tok.text);
                    if (it == vars.end()) {
                        if (!allow_new_vars)
                            throw SemrdError(SemrdError::Kind::Parse,
                                             "line " + std::to_string(tok.line) + ", col " +
                                                 std::to_string(tok.col) + ": unsafe rule (head variable '" +
                                                 tok.text + "' not bound in body)");
                        std::int32_t id = static_cast<std::int32_t>(vars.size());
                        it = vars.emplace(tok.text, id).first;
                    }
                    a.is_var = true;
                    a.id = it->second;
                    if (body_vars) body_vars->insert(tok.text);
                } else {
                    a.is_var = false;
                    a.id = program.intern_constant(tok.text);
                }
                t.args.push_back(a);
            }
            return t;
        };
        std::unordered_set<std::string> body_vars;
        for (const auto& b : rbody) rule.body.push_back(convert(b, true, &body_vars));
        // Range restriction: head variables must already be bound by the body.
        rule.head = convert(rhead, false, nullptr);
        rule.var_count = static_cast<int>(vars.size());
        program.add_rule(std::move(rule));
    }

    static bool rule_equal(const Rule& a, const Rule& b) {
        auto t_eq = [](const AtomTemplate& x, const AtomTemplate& y) {
            if (x.pred != y.pred || x.args.size() != y.args.size()) return false;
            for (std::size_t i = 0; i < x.args.size(); ++i)
                if (x.args[i].is_var != y.args[i].is_var || x.args[i].id != y.args[i].id)
                    return false;
            return true;
        };
        if (!t_eq(a.head, b.head) || a.body.size() != b.body.size()) return false;
        for (std::size_t i = 0; i < a.body.size(); ++i)
            if (!t_eq(a.body[i], b.body[i])) return false;
        return true;
    }

    std::string text_;
    std::size_t pos_ = 0;
    int line_ = 1, col_ = 1;
};

} // namespace detail

inline ParsedProgram parse_program(const std::string& text) {
    return detail::Parser(text).run();
}

/*-----------------------------------------------------------
 * Semi-naive evaluation
 *---------------------------------------------------------*/
namespace detail {

struct TupleHash {
    std::size_t operator()(const std::vector<std::int32_t>& v) const {
        std::uint64_t h = 1469598103934665603ULL;
        for (std::int32_t x : v)
            h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(x)) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        return static_cast<std::size_t>(h);
    }
};

/// Per-predicate fact store with round tags and per-position indexes.
struct Relation {
    int arity = 0;
    std::vector<std::vector<std::int32_t>> tuples;
    std::vector<int> round_of;
    std::vector<std::size_t> round_begin; // round_begin[r] = first index added at round r
    std::unordered_set<std::vector<std::int32_t>, TupleHash> present;
    std::vector<std::unordered_map<std::int32_t, std::vector<std::size_t>>> index;

    void init(int a) {
        arity = a;
        index.resize(static_cast<std::size_t>(a));
    }

    bool add(const std::vector<std::int32_t>& tup, int round) {
        if (!present.insert(tup).second) return false;
        std::size_t idx = tuples.size();
        tuples.push_back(tup);
        round_of.push_back(round);
        while (round_begin.size() <= static_cast<std::size_t>(round))
            round_begin.push_back(idx);
        for (int i = 0; i < arity; ++i)
            index[static_cast<std::size_t>(i)][tup[static_cast<std::size_t>(i)]].push_back(idx);
        return true;
    }

    std::size_t first_of_round(int round) const {
        return round < static_cast<int>(round_begin.size())
                   ? round_begin[static_cast<std::size_t>(round)]
                   : tuples.size();
    }
};

class Evaluator {
public:
    Evaluator(const Program& program, const std::vector<GroundAtom>& base)
        : program_(program) {
        relations_.resize(program.predicate_count());
        for (std::size_t p = 0; p < relations_.size(); ++p)
            relations_[p].init(program.predicate(static_cast<std::int32_t>(p)).arity);
        for (const auto& a : base)
            if (relations_[static_cast<std::size_t>(a.pred)].add(a.args, 0))
                order_.push_back(a);
    }

    /// Runs rounds until fixpoint, the round bound, or the target atom.
    /// Returns the number of productive rounds.
    int run(int max_rounds, const GroundAtom* target) {
        target_found_ = target && contains(*target);
        if (target_found_) { target_round_ = round_found(*target); return 0; }
        int round = 0;
        while (max_rounds < 0 || round < max_rounds) {
            ++round;
            buffer_.clear();
            buffered_.clear();
            for (const auto& rule : program_.rules()) fire(rule, round);
            if (buffer_.empty()) { --round; break; }
            for (const auto& atom : buffer_) {
                if (relations_[static_cast<std::size_t>(atom.pred)].add(atom.args, round))
                    order_.push_back(atom);
            }
            if (target && contains(*target)) {
                target_found_ = true;
                target_round_ = round;
                break;
            }
        }
        rounds_ = round;
        return round;
    }

    bool contains(const GroundAtom& a) const {
        const auto& rel = relations_[static_cast<std::size_t>(a.pred)];
        return rel.present.count(a.args) > 0;
    }

    int round_found(const GroundAtom& a) const {
        const auto& rel = relations_[static_cast<std::size_t>(a.pred)];
        for (std::size_t i = 0; i < rel.tuples.size(); ++i)
            if (rel.tuples[i] == a.args) return rel.round_of[i];
        return -1;
    }

    const std::vector<GroundAtom>& atoms_in_insertion_order() const { return order_; }

    std::unordered_map<GroundAtom, int, AtomHash> round_map() const {
        std::unordered_map<GroundAtom, int, AtomHash> out;
        out.reserve(order_.size());
        for (std::size_t p = 0; p < relations_.size(); ++p) {
            const auto& rel = relations_[p];
            for (std::size_t i = 0; i < rel.tuples.size(); ++i) {
                GroundAtom a;
                a.pred = static_cast<std::int32_t>(p);
                a.args = rel.tuples[i];
                out.emplace(std::move(a), rel.round_of[i]);
            }
        }
        return out;
    }

    bool target_found() const { return target_found_; }
    int target_round() const { return target_round_; }
    int rounds() const { return rounds_; }

private:
    /// Fire one rule semi-naively for the given round: for each choice of
    /// a "delta" body position, the delta literal ranges over atoms first
    /// derived at round-1, earlier positions over strictly older atoms,
    /// and later positions over the full current set.  The union over
    /// delta positions is exactly T^round \ T^(round-1).
    void fire(const Rule& rule, int round) {
        const int k = static_cast<int>(rule.body.size());
        std::vector<std::int32_t> binding(static_cast<std::size_t>(rule.var_count), -1);
        for (int di = 0; di < k; ++di) {
            const auto& dlit = rule.body[static_cast<std::size_t>(di)];
            const auto& drel = relations_[static_cast<std::size_t>(dlit.pred)];
            const std::size_t lo = drel.first_of_round(round - 1);
            const std::size_t hi = drel.first_of_round(round);
            for (std::size_t t = lo; t < hi; ++t) {
                std::fill(binding.begin(), binding.end(), -1);
                if (!bind(dlit, drel.tuples[t], binding)) continue;
                match_rest(rule, round, di, 0, binding);
            }
        }
    }

    bool bind(const AtomTemplate& lit, const std::vector<std::int32_t>& tup,
              std::vector<std::int32_t>& binding) const {
        for (std::size_t i = 0; i < lit.args.size(); ++i) {
            const auto& a = lit.args[i];
            if (a.is_var) {
                std::int32_t& slot = binding[static_cast<std::size_t>(a.id)];
                if (slot == -1) slot = tup[i];
                else if (slot != tup[i]) return false;
            } else if (a.id != tup[i]) {
                return false;
            }
        }
        return true;
    }

    void match_rest(const Rule& rule, int round, int di, int pos,
                    std::vector<std::int32_t>& binding) {
        const int k = static_cast<int>(rule.body.size());
        if (pos == k) {
            emit(rule.head, binding);
            return;
        }
        if (pos == di) {
            match_rest(rule, round, di, pos + 1, binding);
            return;
        }
        const auto& lit = rule.body[static_cast<std::size_t>(pos)];
        const auto& rel = relations_[static_cast<std::size_t>(lit.pred)];
        // Positions before the delta literal see only atoms strictly older
        // than the delta (round <= round-2); later positions see all atoms
        // present at the start of this round.
        const std::size_t cap = (pos < di) ? rel.first_of_round(round - 1)
                                           : rel.first_of_round(round);

        // Choose the most selective bound position, if any.
        int best_pos = -1;
        std::size_t best_size = 0;
        for (std::size_t i = 0; i < lit.args.size(); ++i) {
            const auto& a = lit.args[i];
            std::int32_t value;
            if (a.is_var) {
                value = binding[static_cast<std::size_t>(a.id)];
                if (value == -1) continue;
            } else {
                value = a.id;
            }
            auto it = rel.index[i].find(value);
            std::size_t n = (it == rel.index[i].end()) ? 0 : it->second.size();
            if (best_pos < 0 || n < best_size) {
                best_pos = static_cast<int>(i);
                best_size = n;
            }
        }

        auto try_tuple = [&](std::size_t idx) {
            if (idx >= cap) return;
            std::vector<std::int32_t> saved = binding;
            if (bind(lit, rel.tuples[idx], binding))
                match_rest(rule, round, di, pos + 1, binding);
            binding = std::move(saved);
        };

        if (best_pos >= 0) {
            const auto& a = lit.args[static_cast<std::size_t>(best_pos)];
            std::int32_t value = a.is_var ? binding[static_cast<std::size_t>(a.id)] : a.id;
            auto it = rel.index[static_cast<std::size_t>(best_pos)].find(value);
            if (it == rel.index[static_cast<std::size_t>(best_pos)].end()) return;
            for (std::size_t idx : it->second) try_tuple(idx);
        } else {
            for (std::size_t idx = 0; idx < cap; ++idx) try_tuple(idx);
        }
    }

    void emit(const AtomTemplate& head, const std::vector<std::int32_t>& binding) {
        GroundAtom atom;
        atom.pred = head.pred;
        atom.args.reserve(head.args.size());
        for (const auto& a : head.args)
            atom.args.push_back(a.is_var ? binding[static_cast<std::size_t>(a.id)] : a.id);
        if (relations_[static_cast<std::size_t>(atom.pred)].present.count(atom.args)) return;
        if (!buffered_.insert(atom).second) return;
        buffer_.push_back(std::move(atom));
    }

    const Program& program_;
    std::vector<Relation> relations_;
    std::vector<GroundAtom> order_;
    std::vector<GroundAtom> buffer_;
    std::unordered_set<GroundAtom, AtomHash> buffered_;
    bool target_found_ = false;
    int target_round_ = -1;
    int rounds_ = 0;
};

} // namespace detail

struct ClosureResult {
    FactSet closure;
    int stabilization_round = 0;
};

/// T^n applied to `base`: n rounds of simultaneous one-step rule
/// application.  Monotone in n; n = 0 returns `base` unchanged.
inline FactSet iterate_consequence(const ProgramPtr& program, const FactSet& base, int n) {
    if (n < 0)
        throw SemrdError(SemrdError::Kind::Config, "iterate_consequence: n must be >= 0");
    detail::Evaluator ev(*program, base.atoms());
    ev.run(n, nullptr);
    return FactSet(program, ev.atoms_in_insertion_order());
}

/// Least fixpoint of the immediate-consequence operator containing
/// `base`, with the first round index at which it stabilizes.
inline ClosureResult closure(const ProgramPtr& program, const FactSet& base) {
    detail::Evaluator ev(*program, base.atoms());
    int rounds = ev.run(-1, nullptr);
    return ClosureResult{FactSet(program, ev.atoms_in_insertion_order()), rounds};
}

/// Closure with first-derivation rounds (= derivation depths from `base`).
inline std::unordered_map<GroundAtom, int, AtomHash>
closure_depths(const ProgramPtr& program, const FactSet& base) {
    detail::Evaluator ev(*program, base.atoms());
    ev.run(-1, nullptr);
    return ev.round_map();
}

/// Membership of `target` in T^max_rounds(base); unbounded when
/// max_rounds < 0 (i.e., membership in the closure).  Early-exits as
/// soon as the target appears.
inline bool closure_contains(const ProgramPtr& program, const FactSet& base,
                             const GroundAtom& target, int max_rounds = -1) {
    detail::Evaluator ev(*program, base.atoms());
    ev.run(max_rounds, &target);
    return ev.target_found();
}

/// Minimal n with target in T^n(base); std::nullopt iff underivable.
inline std::optional<int> derivation_depth(const ProgramPtr& program, const FactSet& base,
                                           const GroundAtom& target) {
    detail::Evaluator ev(*program, base.atoms());
    ev.run(-1, &target);
    if (!ev.target_found()) return std::nullopt;
    return ev.target_round();
}

/// Convenience: look up an atom by rendered text, e.g. "Edge(a,b)".
/// Throws when the predicate or a constant is unknown to the program.
inline GroundAtom make_atom(const Program& program, const std::string& pred,
                            const std::vector<std::string>& args) {
    GroundAtom a;
    auto p = program.find_predicate(pred);
    if (!p)
        throw SemrdError(SemrdError::Kind::Config, "unknown predicate '" + pred + "'");
    if (program.predicate(*p).arity != static_cast<int>(args.size()))
        throw SemrdError(SemrdError::Kind::Config, "arity mismatch for '" + pred + "'");
    a.pred = *p;
    for (const auto& c : args) {
        auto id = program.find_constant(c);
        if (!id)
            throw SemrdError(SemrdError::Kind::Config, "unknown constant '" + c + "'");
        a.args.push_back(*id);
    }
    return a;
}

inline GroundAtom parse_atom(const Program& program, const std::string& text) {
    auto lp = text.find('(');
    auto rp = text.rfind(')');
    if (lp == std::string::npos || rp == std::string::npos || rp < lp)
        throw SemrdError(SemrdError::Kind::Config, "malformed atom '" + text + "'");
    std::string pred = text.substr(0, lp);
    std::vector<std::string> args;
    std::string inner = text.substr(lp + 1, rp - lp - 1);
    std::stringstream ss(inner);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        // Trim surrounding whitespace.
        std::size_t b = tok.find_first_not_of(" \t");
        std::size_t e = tok.find_last_not_of(" \t");
        if (b == std::string::npos)
            throw SemrdError(SemrdError::Kind::Config, "malformed atom '" + text + "'");
        args.push_back(tok.substr(b, e - b + 1));
    }
    return make_atom(program, pred, args);
}

} // namespace semrd

#endif // SEMRD_DATALOG_HPP
